//! Finitely supported maps `M_S(X)`: the free `S`-module on a carrier.

use std::collections::btree_map;
use std::collections::BTreeMap;
use std::fmt;

use crate::carrier::Elem;
use crate::error::{Error, Result};
use crate::semiring::{Semiring, Value};

/// A finitely supported map from elements to scalars. Zero values are never
/// stored, so two multisets are equal iff their entry maps are equal.
#[derive(Clone, Debug, PartialEq)]
pub struct FinMultiset {
    semiring: Semiring,
    entries: BTreeMap<Elem, Value>,
}

impl FinMultiset {
    pub fn new(semiring: Semiring) -> Self {
        FinMultiset {
            semiring,
            entries: BTreeMap::new(),
        }
    }

    /// The basis vector `1·e`.
    pub fn unit(semiring: Semiring, e: Elem) -> Self {
        let mut m = FinMultiset::new(semiring);
        m.entries.insert(e, semiring.one());
        m
    }

    /// Sums repeated keys and drops zeros.
    pub fn from_pairs(semiring: Semiring, pairs: impl IntoIterator<Item = (Elem, Value)>) -> Result<Self> {
        let mut m = FinMultiset::new(semiring);
        for (e, v) in pairs {
            if v.semiring() != semiring {
                return Err(Error::MixedSemiring(semiring, v.semiring()));
            }
            m.insert_add(e, v);
        }
        Ok(m)
    }

    pub fn semiring(&self) -> Semiring {
        self.semiring
    }

    pub fn get(&self, e: &Elem) -> Value {
        self.entries
            .get(e)
            .cloned()
            .unwrap_or_else(|| self.semiring.zero())
    }

    pub fn get_ref(&self, e: &Elem) -> Option<&Value> {
        self.entries.get(e)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in canonical element order.
    pub fn iter(&self) -> btree_map::Iter<'_, Elem, Value> {
        self.entries.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Elem> {
        self.entries.keys()
    }

    pub fn contains(&self, e: &Elem) -> bool {
        self.entries.contains_key(e)
    }

    /// Adds `v` at `e`, removing the key if the sum is zero.
    ///
    /// Panics if `v` belongs to another semiring.
    pub fn insert_add(&mut self, e: Elem, v: Value) {
        if v.is_zero() {
            return;
        }
        match self.entries.entry(e) {
            btree_map::Entry::Vacant(slot) => {
                slot.insert(v);
            }
            btree_map::Entry::Occupied(mut slot) => {
                let sum = slot.get().add(&v);
                if sum.is_zero() {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
        }
    }

    fn check(&self, o: &FinMultiset) -> Result<()> {
        if self.semiring != o.semiring {
            return Err(Error::MixedSemiring(self.semiring, o.semiring));
        }
        Ok(())
    }

    pub fn scale(&self, s: &Value) -> FinMultiset {
        let mut out = FinMultiset::new(self.semiring);
        if s.is_zero() {
            return out;
        }
        for (e, v) in &self.entries {
            let p = s.mul(v);
            if !p.is_zero() {
                out.entries.insert(e.clone(), p);
            }
        }
        out
    }

    pub fn add(&self, o: &FinMultiset) -> Result<FinMultiset> {
        self.check(o)?;
        let mut out = self.clone();
        out.add_assign_unchecked(o);
        Ok(out)
    }

    pub(crate) fn add_assign_unchecked(&mut self, o: &FinMultiset) {
        for (e, v) in &o.entries {
            self.insert_add(e.clone(), v.clone());
        }
    }

    /// `self + s·o`, in place.
    pub(crate) fn axpy(&mut self, s: &Value, o: &FinMultiset) {
        if s.is_zero() {
            return;
        }
        for (e, v) in &o.entries {
            self.insert_add(e.clone(), s.mul(v));
        }
    }

    pub fn sub(&self, o: &FinMultiset) -> Result<FinMultiset> {
        self.check(o)?;
        let minus_one = self.semiring.one().neg()?;
        let mut out = self.clone();
        out.axpy(&minus_one, o);
        Ok(out)
    }

    /// `Σᵢ sᵢ·φᵢ`.
    pub fn linear_combine(semiring: Semiring, terms: &[(Value, FinMultiset)]) -> Result<FinMultiset> {
        let mut out = FinMultiset::new(semiring);
        for (s, phi) in terms {
            if s.semiring() != semiring {
                return Err(Error::MixedSemiring(semiring, s.semiring()));
            }
            out.check(phi)?;
            out.axpy(s, phi);
        }
        Ok(out)
    }

    /// `Σₓ conj(φ(x))·ψ(x)`: conjugate-linear in the first argument.
    pub fn inner(&self, o: &FinMultiset) -> Result<Value> {
        self.check(o)?;
        Ok(self.inner_unchecked(o))
    }

    pub(crate) fn inner_unchecked(&self, o: &FinMultiset) -> Value {
        let (small, large, flip) = if self.len() <= o.len() {
            (self, o, false)
        } else {
            (o, self, true)
        };
        let mut acc = self.semiring.zero();
        for (e, v) in &small.entries {
            if let Some(w) = large.entries.get(e) {
                let term = if flip { w.conj().mul(v) } else { v.conj().mul(w) };
                acc = acc.add(&term);
            }
        }
        acc
    }

    pub fn norm_sq(&self) -> Value {
        self.inner_unchecked(self)
    }

    /// Scales to unit norm.
    pub fn normalize(&self) -> Result<FinMultiset> {
        if self.is_empty() {
            return Err(Error::ZeroVector);
        }
        let n = self.norm_sq();
        if n.is_zero() {
            return Err(Error::ZeroVector);
        }
        let root = n.sqrt_nonneg()?;
        Ok(self.scale(&root.inv()?))
    }

    /// Pairwise orthogonal and each of norm 1.
    pub fn is_orthonormal(vs: &[FinMultiset], tol: f64) -> bool {
        let Some(first) = vs.first() else {
            return true;
        };
        let s = first.semiring;
        if vs.iter().any(|v| v.semiring != s) {
            return false;
        }
        let one = s.one();
        for (i, v) in vs.iter().enumerate() {
            if !v.norm_sq().approx_eq(&one, tol) {
                return false;
            }
            for w in &vs[i + 1..] {
                if !v.inner_unchecked(w).approx_zero(tol) {
                    return false;
                }
            }
        }
        true
    }

    pub fn conj(&self) -> FinMultiset {
        FinMultiset {
            semiring: self.semiring,
            entries: self
                .entries
                .iter()
                .map(|(e, v)| (e.clone(), v.conj()))
                .collect(),
        }
    }

    /// Entrywise equality, within `tol` for float semirings.
    pub fn approx_eq(&self, o: &FinMultiset, tol: f64) -> bool {
        if self.semiring != o.semiring {
            return false;
        }
        if !self.semiring.is_float() {
            return self.entries == o.entries;
        }
        let zero = self.semiring.zero();
        self.entries
            .iter()
            .all(|(e, v)| v.approx_eq(o.entries.get(e).unwrap_or(&zero), tol))
            && o.entries
                .iter()
                .all(|(e, w)| self.entries.contains_key(e) || w.approx_zero(tol))
    }

    /// Pushes the support along `f`, merging collisions additively.
    pub fn relabel(&self, f: impl Fn(&Elem) -> Elem) -> FinMultiset {
        let mut out = FinMultiset::new(self.semiring);
        for (e, v) in &self.entries {
            out.insert_add(f(e), v.clone());
        }
        out
    }

    /// Keeps entries whose key satisfies `keep`.
    pub fn filter(&self, keep: impl Fn(&Elem) -> bool) -> FinMultiset {
        FinMultiset {
            semiring: self.semiring,
            entries: self
                .entries
                .iter()
                .filter(|(e, _)| keep(e))
                .map(|(e, v)| (e.clone(), v.clone()))
                .collect(),
        }
    }

    /// Applies `f` to every value, dropping results that are zero.
    pub fn map_values(&self, semiring: Semiring, f: impl Fn(&Value) -> Value) -> FinMultiset {
        let mut out = FinMultiset::new(semiring);
        for (e, v) in &self.entries {
            let w = f(v);
            if !w.is_zero() {
                out.entries.insert(e.clone(), w);
            }
        }
        out
    }

    /// Drops float entries of magnitude at most `tol`.
    pub fn chop(&self, tol: f64) -> FinMultiset {
        FinMultiset {
            semiring: self.semiring,
            entries: self
                .entries
                .iter()
                .filter(|(_, v)| !v.approx_zero(tol))
                .map(|(e, v)| (e.clone(), v.clone()))
                .collect(),
        }
    }

    pub fn into_entries(self) -> BTreeMap<Elem, Value> {
        self.entries
    }
}

impl IntoIterator for FinMultiset {
    type Item = (Elem, Value);
    type IntoIter = btree_map::IntoIter<Elem, Value>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.into_iter()
    }
}

impl<'a> IntoIterator for &'a FinMultiset {
    type Item = (&'a Elem, &'a Value);
    type IntoIter = btree_map::Iter<'a, Elem, Value>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}

impl fmt::Display for FinMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (e, v)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{e}: {v}")?;
        }
        f.write_str("}")
    }
}
