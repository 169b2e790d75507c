//! Small instance categories living inside the relations: partial
//! injections, Boolean bifinite relations and discrete bistochastic
//! relations.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::carrier::{Carrier, Elem};
use crate::error::{Error, Result};
use crate::multiset::FinMultiset;
use crate::rel::{compose, Rel};
use crate::semiring::{Prob, Semiring};

/// A partial injection `X ⇀ Y`, kept as a finite table in both directions.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialInjection {
    dom: Carrier,
    cod: Carrier,
    fwd: BTreeMap<Elem, Elem>,
    bwd: BTreeMap<Elem, Elem>,
}

impl PartialInjection {
    /// From `(x, y)` pairs; rejects a repeated `x` or a repeated `y`.
    pub fn new(dom: Carrier, cod: Carrier, pairs: impl IntoIterator<Item = (Elem, Elem)>) -> Result<Self> {
        let mut fwd = BTreeMap::new();
        let mut bwd = BTreeMap::new();
        for (x, y) in pairs {
            dom.check_contains(&x)?;
            cod.check_contains(&y)?;
            if fwd.contains_key(&x) {
                return Err(Error::NotPartialInjection(format!("{x} has two images")));
            }
            if bwd.contains_key(&y) {
                return Err(Error::NotPartialInjection(format!("{y} has two preimages")));
            }
            fwd.insert(x.clone(), y.clone());
            bwd.insert(y, x);
        }
        Ok(PartialInjection { dom, cod, fwd, bwd })
    }

    pub fn identity(x: Carrier) -> Result<Self> {
        let xs = x.require_elements()?;
        PartialInjection::new(x.clone(), x, xs.into_iter().map(|e| (e.clone(), e)))
    }

    pub fn empty(dom: Carrier, cod: Carrier) -> Self {
        PartialInjection {
            dom,
            cod,
            fwd: BTreeMap::new(),
            bwd: BTreeMap::new(),
        }
    }

    pub fn dom(&self) -> &Carrier {
        &self.dom
    }

    pub fn cod(&self) -> &Carrier {
        &self.cod
    }

    pub fn apply(&self, x: &Elem) -> Option<&Elem> {
        self.fwd.get(x)
    }

    pub fn unapply(&self, y: &Elem) -> Option<&Elem> {
        self.bwd.get(y)
    }

    /// Defined pairs in canonical order.
    pub fn pairs(&self) -> impl Iterator<Item = (&Elem, &Elem)> {
        self.fwd.iter()
    }

    pub fn len(&self) -> usize {
        self.fwd.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fwd.is_empty()
    }

    /// `fwd(x) = y ⟺ bwd(y) = x`.
    pub fn is_mutually_inverse(&self) -> bool {
        self.fwd.len() == self.bwd.len()
            && self.fwd.iter().all(|(x, y)| self.bwd.get(y) == Some(x))
    }

    /// `g ∘ f` ("first `self`, then `g`").
    pub fn compose(&self, g: &PartialInjection) -> Result<PartialInjection> {
        if self.cod != g.dom {
            return Err(Error::CarrierMismatch(format!(
                "cannot compose {} ⇀ {} with {} ⇀ {}",
                self.dom, self.cod, g.dom, g.cod
            )));
        }
        let pairs = self
            .fwd
            .iter()
            .filter_map(|(x, y)| g.fwd.get(y).map(|z| (x.clone(), z.clone())));
        let mut out = PartialInjection::empty(self.dom.clone(), g.cod.clone());
        for (x, z) in pairs {
            out.bwd.insert(z.clone(), x.clone());
            out.fwd.insert(x, z);
        }
        Ok(out)
    }

    pub fn dagger(&self) -> PartialInjection {
        PartialInjection {
            dom: self.cod.clone(),
            cod: self.dom.clone(),
            fwd: self.bwd.clone(),
            bwd: self.fwd.clone(),
        }
    }

    /// The 0/1 relation with entry 1 iff `fwd(x) = y`.
    pub fn embed(&self) -> Rel {
        self.embed_into(Semiring::Bool2)
    }

    /// The graph relation over any semiring, via `{0, 1} ↪ S`.
    pub fn embed_into(&self, semiring: Semiring) -> Rel {
        let entries = self
            .fwd
            .iter()
            .map(|(x, y)| (x.clone(), y.clone(), semiring.one()));
        Rel::from_entries(semiring, self.dom.clone(), self.cod.clone(), entries.collect::<Vec<_>>())
            .expect("validated at construction")
    }

    /// Recovers a partial injection from a relation whose entries are all 1
    /// and which has at most one entry per row and per column.
    pub fn from_rel(r: &Rel) -> Result<Self> {
        let entries = r.entries()?;
        let mut pairs = Vec::with_capacity(entries.len());
        for (x, y, v) in entries {
            if !v.is_one() {
                return Err(Error::NotPartialInjection(format!("entry ({x}, {y}) is {v}, not 1")));
            }
            pairs.push((x, y));
        }
        PartialInjection::new(r.dom().clone(), r.cod().clone(), pairs)
    }
}

/// Outcome of the windowed bifiniteness lint.
#[derive(Clone, Debug, PartialEq)]
pub enum BifinitenessVerdict {
    /// Supports stayed put as the window grew. Not a proof.
    Plausible,
    /// The row (or column) at this point kept gaining support as the window
    /// grew: `(is_row, point, small count, large count)`.
    Growing { row: bool, at: i64, small: usize, large: usize },
}

/// Whether a relation's stored rows and columns are finite. Every [`Rel`]
/// is bifinite by construction (rows and columns are finite multisets), so
/// this only double-checks the 0/1 value range.
pub fn is_bifinite_bool(r: &Rel) -> bool {
    match r.explicit_rows() {
        Some(rows) => rows.values().all(|m| m.iter().all(|(_, v)| v.is_one())),
        None => true,
    }
}

/// A heuristic lint for a Boolean relation on `ℤ × ℤ` given as a predicate:
/// for every centre `n`, count the support of row `n` and column `n` inside
/// `[n − small, n + small]` and `[n − large, n + large]`. Strict growth
/// suggests unbounded support. A lint, never a proof.
pub fn bifiniteness_lint(pred: impl Fn(i64, i64) -> bool, centres: &[i64], small: i64, large: i64) -> BifinitenessVerdict {
    assert!(small < large, "windows must grow");
    let count = |n: i64, r: i64, row: bool| {
        (n - r..=n + r)
            .filter(|&m| if row { pred(n, m) } else { pred(m, n) })
            .count()
    };
    for &n in centres {
        for row in [true, false] {
            let (a, b) = (count(n, small, row), count(n, large, row));
            if b > a {
                return BifinitenessVerdict::Growing {
                    row,
                    at: n,
                    small: a,
                    large: b,
                };
            }
        }
    }
    BifinitenessVerdict::Plausible
}

fn prob_zero(float: bool) -> Prob {
    if float {
        Prob::Float(0.0)
    } else {
        Prob::Exact(BigRational::zero())
    }
}

fn sum_is_one(m: &FinMultiset, float: bool, tol: f64) -> bool {
    m.iter()
        .fold(prob_zero(float), |acc, (_, v)| acc.add(&v.to_unit_interval().expect("checked")))
        .is_one(tol)
}

/// Every row and every column sums to 1 (within `tol` for floats). Entries
/// must lie in `[0, 1]`.
pub fn is_bistochastic(r: &Rel, tol: f64) -> Result<bool> {
    let r = r.to_explicit()?;
    let float = r.semiring().is_float();
    for (x, y, v) in r.entries()? {
        let p = v
            .to_unit_interval()
            .map_err(|_| Error::EntryOutOfRange(format!("({x}, {y}) = {v}")))?;
        let above = match &p {
            Prob::Exact(q) => q > &BigRational::one(),
            Prob::Float(f) => *f > 1.0 + tol,
        };
        if above {
            return Err(Error::EntryOutOfRange(format!("({x}, {y}) = {v}")));
        }
    }
    let (Some(xs), Some(ys)) = (r.dom().elements(), r.cod().elements()) else {
        return Ok(false);
    };
    Ok(xs.iter().all(|x| sum_is_one(&r.row(x), float, tol)) && ys.iter().all(|y| sum_is_one(&r.col(y), float, tol)))
}

/// Bistochastic relations are closed under composition: checks that `s∘r`
/// is bistochastic whenever both factors are.
pub fn bistochastic_closed(r: &Rel, s: &Rel, tol: f64) -> Result<bool> {
    if !is_bistochastic(r, tol)? || !is_bistochastic(s, tol)? {
        return Ok(true);
    }
    is_bistochastic(&compose(r, s)?, tol)
}
