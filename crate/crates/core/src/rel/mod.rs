//! Bifinite multirelations and the dagger category they form.
//!
//! A relation `r: X → Y` is stored twice: by rows (`x ↦ r(x, −)`) and by
//! columns (`y ↦ r(−, y)`). Both views are finite multisets, so bifiniteness
//! holds by construction and the dagger is a structural flip.
//!
//! Relations come in two representations. *Explicit* relations have finite
//! total support and keep both views as materialized tables (empty rows and
//! columns are not stored). *Lazy* relations compute rows and columns on
//! demand; they are how infinite-support relations such as identities on `ℤ`
//! or the Hadamard walk are expressed. Lazy relations are trusted to be
//! bifinite and coherent — [`Rel::check_coherent`] samples that contract.

mod classify;
mod structure;

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub use classify::{Classification, ClassifyOptions, CoherenceReport};

use crate::carrier::{Carrier, Elem};
use crate::error::{Error, Result};
use crate::multiset::FinMultiset;
use crate::semiring::{Semiring, Value};

/// Row or column action of a lazy relation.
pub type Action = Arc<dyn Fn(&Elem) -> FinMultiset + Send + Sync>;

type Table = Arc<BTreeMap<Elem, FinMultiset>>;

#[derive(Clone)]
enum Repr {
    Explicit { rows: Table, cols: Table },
    Lazy { row: Action, col: Action },
}

#[derive(Clone)]
pub struct Rel {
    semiring: Semiring,
    dom: Carrier,
    cod: Carrier,
    repr: Repr,
    builtin: Option<Arc<str>>,
}

fn transpose(semiring: Semiring, rows: &BTreeMap<Elem, FinMultiset>) -> BTreeMap<Elem, FinMultiset> {
    let mut cols: BTreeMap<Elem, FinMultiset> = BTreeMap::new();
    for (x, row) in rows {
        for (y, v) in row {
            cols.entry(y.clone())
                .or_insert_with(|| FinMultiset::new(semiring))
                .insert_add(x.clone(), v.clone());
        }
    }
    cols
}

impl Rel {
    // ---- construction -------------------------------------------------

    /// Trusted constructor: rows are nonempty and already valid.
    fn explicit_from_rows(semiring: Semiring, dom: Carrier, cod: Carrier, mut rows: BTreeMap<Elem, FinMultiset>) -> Rel {
        rows.retain(|_, r| !r.is_empty());
        let cols = transpose(semiring, &rows);
        Rel {
            semiring,
            dom,
            cod,
            repr: Repr::Explicit {
                rows: Arc::new(rows),
                cols: Arc::new(cols),
            },
            builtin: None,
        }
    }

    fn explicit_from_cols(semiring: Semiring, dom: Carrier, cod: Carrier, mut cols: BTreeMap<Elem, FinMultiset>) -> Rel {
        cols.retain(|_, c| !c.is_empty());
        let rows = transpose(semiring, &cols);
        Rel {
            semiring,
            dom,
            cod,
            repr: Repr::Explicit {
                rows: Arc::new(rows),
                cols: Arc::new(cols),
            },
            builtin: None,
        }
    }

    fn validate_table(semiring: Semiring, keys: &Carrier, vals: &Carrier, table: &BTreeMap<Elem, FinMultiset>) -> Result<()> {
        for (k, m) in table {
            keys.check_contains(k)?;
            if m.semiring() != semiring {
                return Err(Error::MixedSemiring(semiring, m.semiring()));
            }
            for e in m.support() {
                vals.check_contains(e)?;
            }
        }
        Ok(())
    }

    /// An explicit relation from its rows.
    pub fn from_rows(semiring: Semiring, dom: Carrier, cod: Carrier, rows: BTreeMap<Elem, FinMultiset>) -> Result<Rel> {
        Self::validate_table(semiring, &dom, &cod, &rows)?;
        Ok(Self::explicit_from_rows(semiring, dom, cod, rows))
    }

    /// An explicit relation from its columns.
    pub fn from_cols(semiring: Semiring, dom: Carrier, cod: Carrier, cols: BTreeMap<Elem, FinMultiset>) -> Result<Rel> {
        Self::validate_table(semiring, &cod, &dom, &cols)?;
        Ok(Self::explicit_from_cols(semiring, dom, cod, cols))
    }

    /// An explicit relation from `(x, y, value)` triples. Zero values are
    /// dropped; a repeated `(x, y)` key is an error.
    pub fn from_entries(
        semiring: Semiring,
        dom: Carrier,
        cod: Carrier,
        entries: impl IntoIterator<Item = (Elem, Elem, Value)>,
    ) -> Result<Rel> {
        let mut rows: BTreeMap<Elem, FinMultiset> = BTreeMap::new();
        let mut seen = std::collections::BTreeSet::new();
        for (x, y, v) in entries {
            if v.semiring() != semiring {
                return Err(Error::MixedSemiring(semiring, v.semiring()));
            }
            dom.check_contains(&x)?;
            cod.check_contains(&y)?;
            if !seen.insert((x.clone(), y.clone())) {
                return Err(Error::DuplicateEntry(x.to_string(), y.to_string()));
            }
            rows.entry(x)
                .or_insert_with(|| FinMultiset::new(semiring))
                .insert_add(y, v);
        }
        Ok(Self::explicit_from_rows(semiring, dom, cod, rows))
    }

    /// An explicit relation between finite carriers from a dense matrix whose
    /// rows follow the canonical order of `dom` and columns that of `cod`.
    pub fn from_matrix(semiring: Semiring, dom: Carrier, cod: Carrier, matrix: Vec<Vec<Value>>) -> Result<Rel> {
        let xs = dom.require_elements()?;
        let ys = cod.require_elements()?;
        if matrix.len() != xs.len() || matrix.iter().any(|r| r.len() != ys.len()) {
            return Err(Error::InvalidArgument(format!(
                "matrix shape does not match {} × {}",
                xs.len(),
                ys.len()
            )));
        }
        let entries = xs.iter().zip(matrix).flat_map(|(x, row)| {
            ys.iter()
                .zip(row)
                .map(move |(y, v)| (x.clone(), y.clone(), v))
        });
        Self::from_entries(semiring, dom, cod, entries)
    }

    /// Builds an explicit relation from both tables without checking that
    /// they agree. Only useful for exercising [`Rel::check_coherent`].
    pub fn from_tables_unchecked(
        semiring: Semiring,
        dom: Carrier,
        cod: Carrier,
        rows: BTreeMap<Elem, FinMultiset>,
        cols: BTreeMap<Elem, FinMultiset>,
    ) -> Rel {
        Rel {
            semiring,
            dom,
            cod,
            repr: Repr::Explicit {
                rows: Arc::new(rows),
                cols: Arc::new(cols),
            },
            builtin: None,
        }
    }

    /// A lazy relation given by its row and column actions. The actions must
    /// be pure, return finite multisets, and agree: `row(x)(y) = col(y)(x)`.
    pub fn lazy(
        semiring: Semiring,
        dom: Carrier,
        cod: Carrier,
        row: impl Fn(&Elem) -> FinMultiset + Send + Sync + 'static,
        col: impl Fn(&Elem) -> FinMultiset + Send + Sync + 'static,
    ) -> Rel {
        Rel {
            semiring,
            dom,
            cod,
            repr: Repr::Lazy {
                row: Arc::new(row),
                col: Arc::new(col),
            },
            builtin: None,
        }
    }

    /// Tags the relation with the name of a built-in definition so that it
    /// can be serialized by reference.
    pub fn with_builtin(mut self, name: &str) -> Rel {
        self.builtin = Some(Arc::from(name));
        self
    }

    /// The graph of a partial injection `fwd` with inverse `bwd`: entry 1 at
    /// `(x, fwd(x))`. Explicit when either carrier is finite.
    pub fn graph(
        semiring: Semiring,
        dom: Carrier,
        cod: Carrier,
        fwd: impl Fn(&Elem) -> Option<Elem> + Send + Sync + 'static,
        bwd: impl Fn(&Elem) -> Option<Elem> + Send + Sync + 'static,
    ) -> Rel {
        if let Some(xs) = dom.elements() {
            let rows = xs
                .into_iter()
                .filter_map(|x| fwd(&x).map(|y| (x, FinMultiset::unit(semiring, y))))
                .collect();
            return Self::explicit_from_rows(semiring, dom, cod, rows);
        }
        if let Some(ys) = cod.elements() {
            let cols = ys
                .into_iter()
                .filter_map(|y| bwd(&y).map(|x| (y, FinMultiset::unit(semiring, x))))
                .collect();
            return Self::explicit_from_cols(semiring, dom, cod, cols);
        }
        Rel::lazy(
            semiring,
            dom,
            cod,
            move |x| {
                fwd(x)
                    .map(|y| FinMultiset::unit(semiring, y))
                    .unwrap_or_else(|| FinMultiset::new(semiring))
            },
            move |y| {
                bwd(y)
                    .map(|x| FinMultiset::unit(semiring, x))
                    .unwrap_or_else(|| FinMultiset::new(semiring))
            },
        )
    }

    pub fn identity(semiring: Semiring, x: Carrier) -> Rel {
        Rel::graph(semiring, x.clone(), x, |e| Some(e.clone()), |e| Some(e.clone()))
    }

    pub fn zero(semiring: Semiring, dom: Carrier, cod: Carrier) -> Rel {
        Self::explicit_from_rows(semiring, dom, cod, BTreeMap::new())
    }

    /// The scalar `s` as an endomap of the tensor unit.
    pub fn scalar(s: Value) -> Rel {
        let semiring = s.semiring();
        let row = FinMultiset::from_pairs(semiring, [(Elem::Star, s)]).expect("one semiring");
        Self::explicit_from_rows(
            semiring,
            Carrier::Unit,
            Carrier::Unit,
            BTreeMap::from([(Elem::Star, row)]),
        )
    }

    /// Reads an endomap of the tensor unit back as a scalar.
    pub fn to_scalar(&self) -> Result<Value> {
        if self.dom != Carrier::Unit || self.cod != Carrier::Unit {
            return Err(Error::CarrierMismatch(format!(
                "scalar needs 1 → 1, got {} → {}",
                self.dom, self.cod
            )));
        }
        Ok(self.entry(&Elem::Star, &Elem::Star))
    }

    /// The state `1 → X` whose single row is `sigma`.
    pub fn state(cod: Carrier, sigma: FinMultiset) -> Result<Rel> {
        let semiring = sigma.semiring();
        Rel::from_rows(semiring, Carrier::Unit, cod, BTreeMap::from([(Elem::Star, sigma)]))
    }

    // ---- access -------------------------------------------------------

    pub fn semiring(&self) -> Semiring {
        self.semiring
    }

    pub fn dom(&self) -> &Carrier {
        &self.dom
    }

    pub fn cod(&self) -> &Carrier {
        &self.cod
    }

    pub fn builtin(&self) -> Option<&str> {
        self.builtin.as_deref()
    }

    pub fn is_explicit(&self) -> bool {
        matches!(self.repr, Repr::Explicit { .. })
    }

    /// `r(x, −)`.
    pub fn row(&self, x: &Elem) -> Cow<'_, FinMultiset> {
        match &self.repr {
            Repr::Explicit { rows, .. } => match rows.get(x) {
                Some(r) => Cow::Borrowed(r),
                None => Cow::Owned(FinMultiset::new(self.semiring)),
            },
            Repr::Lazy { row, .. } => Cow::Owned(row(x)),
        }
    }

    /// `r(−, y)`.
    pub fn col(&self, y: &Elem) -> Cow<'_, FinMultiset> {
        match &self.repr {
            Repr::Explicit { cols, .. } => match cols.get(y) {
                Some(c) => Cow::Borrowed(c),
                None => Cow::Owned(FinMultiset::new(self.semiring)),
            },
            Repr::Lazy { col, .. } => Cow::Owned(col(y)),
        }
    }

    pub fn entry(&self, x: &Elem, y: &Elem) -> Value {
        self.row(x).get(y)
    }

    /// Nonempty rows, for explicit relations.
    pub fn explicit_rows(&self) -> Option<&BTreeMap<Elem, FinMultiset>> {
        match &self.repr {
            Repr::Explicit { rows, .. } => Some(rows),
            Repr::Lazy { .. } => None,
        }
    }

    /// Nonempty columns, for explicit relations.
    pub fn explicit_cols(&self) -> Option<&BTreeMap<Elem, FinMultiset>> {
        match &self.repr {
            Repr::Explicit { cols, .. } => Some(cols),
            Repr::Lazy { .. } => None,
        }
    }

    /// Materializes a lazy relation with a finite domain or codomain.
    pub fn to_explicit(&self) -> Result<Rel> {
        if self.is_explicit() {
            return Ok(self.clone());
        }
        let mut out = if let Some(xs) = self.dom.elements() {
            let rows = xs
                .into_iter()
                .map(|x| {
                    let r = self.row(&x).into_owned();
                    (x, r)
                })
                .collect();
            Self::explicit_from_rows(self.semiring, self.dom.clone(), self.cod.clone(), rows)
        } else if let Some(ys) = self.cod.elements() {
            let cols = ys
                .into_iter()
                .map(|y| {
                    let c = self.col(&y).into_owned();
                    (y, c)
                })
                .collect();
            Self::explicit_from_cols(self.semiring, self.dom.clone(), self.cod.clone(), cols)
        } else {
            return Err(Error::InfiniteCarrier(format!("{} → {}", self.dom, self.cod)));
        };
        out.builtin = self.builtin.clone();
        Ok(out)
    }

    /// All nonzero entries in canonical `(x, y)` order.
    pub fn entries(&self) -> Result<Vec<(Elem, Elem, Value)>> {
        let e = self.to_explicit()?;
        let rows = e.explicit_rows().expect("explicit");
        Ok(rows
            .iter()
            .flat_map(|(x, r)| r.iter().map(move |(y, v)| (x.clone(), y.clone(), v.clone())))
            .collect())
    }

    /// Number of nonzero entries of an explicit relation.
    pub fn support_size(&self) -> Option<usize> {
        self.explicit_rows().map(|rows| rows.values().map(FinMultiset::len).sum())
    }

    /// Dense matrix over finite carriers, rows in canonical `dom` order.
    pub fn to_matrix(&self) -> Result<Vec<Vec<Value>>> {
        let xs = self.dom.require_elements()?;
        let ys = self.cod.require_elements()?;
        Ok(xs
            .iter()
            .map(|x| {
                let r = self.row(x);
                ys.iter().map(|y| r.get(y)).collect()
            })
            .collect())
    }

    /// Entrywise equality (within `tol` for float semirings). Relations over
    /// different carriers or semirings are unequal. Lazy relations are
    /// materialized first, which fails when both carriers are infinite.
    pub fn approx_eq(&self, o: &Rel, tol: f64) -> Result<bool> {
        if self.semiring != o.semiring || self.dom != o.dom || self.cod != o.cod {
            return Ok(false);
        }
        let a = self.to_explicit()?;
        let b = o.to_explicit()?;
        let (ra, rb) = (a.explicit_rows().unwrap(), b.explicit_rows().unwrap());
        if !self.semiring.is_float() {
            return Ok(ra == rb);
        }
        let empty = FinMultiset::new(self.semiring);
        let same = |x: &Elem| {
            ra.get(x)
                .unwrap_or(&empty)
                .approx_eq(rb.get(x).unwrap_or(&empty), tol)
        };
        Ok(ra.keys().all(same) && rb.keys().all(same))
    }

    /// Row-wise equality on the given domain elements.
    pub fn agrees_on(&self, o: &Rel, samples: &[Elem], tol: f64) -> bool {
        self.semiring == o.semiring
            && samples
                .iter()
                .all(|x| self.row(x).approx_eq(&o.row(x), tol))
    }

    fn check_same_semiring(&self, o: &Rel) -> Result<()> {
        if self.semiring != o.semiring {
            return Err(Error::MixedSemiring(self.semiring, o.semiring));
        }
        Ok(())
    }

    fn check_same_type(&self, o: &Rel) -> Result<()> {
        self.check_same_semiring(o)?;
        if self.dom != o.dom || self.cod != o.cod {
            return Err(Error::CarrierMismatch(format!(
                "{} → {} vs {} → {}",
                self.dom, self.cod, o.dom, o.cod
            )));
        }
        Ok(())
    }

    // ---- category structure ------------------------------------------

    /// `σ ↦ Σₓ σ(x)·r(x, −)`: the action on the free module over `X`.
    pub fn apply_state(&self, sigma: &FinMultiset) -> Result<FinMultiset> {
        if sigma.semiring() != self.semiring {
            return Err(Error::MixedSemiring(self.semiring, sigma.semiring()));
        }
        Ok(self.push(sigma))
    }

    fn push(&self, sigma: &FinMultiset) -> FinMultiset {
        let mut out = FinMultiset::new(self.semiring);
        for (x, s) in sigma {
            out.axpy(s, &self.row(x));
        }
        out
    }

    /// `τ ↦ Σ_y τ(y)·r(−, y)`: the transpose action (no conjugation).
    fn pull(&self, tau: &FinMultiset) -> FinMultiset {
        let mut out = FinMultiset::new(self.semiring);
        for (y, s) in tau {
            out.axpy(s, &self.col(y));
        }
        out
    }

    /// The composite `s ∘ r` ("first `self`, then `s`"); see [`compose`].
    pub fn then(&self, s: &Rel) -> Result<Rel> {
        compose(self, s)
    }

    /// `r†(y, x) = conj(r(x, y))`.
    pub fn dagger(&self) -> Rel {
        let semiring = self.semiring;
        let repr = match &self.repr {
            Repr::Explicit { rows, cols } => {
                if semiring.has_trivial_involution() {
                    Repr::Explicit {
                        rows: cols.clone(),
                        cols: rows.clone(),
                    }
                } else {
                    let conj = |t: &Table| -> Table {
                        Arc::new(t.iter().map(|(k, m)| (k.clone(), m.conj())).collect())
                    };
                    Repr::Explicit {
                        rows: conj(cols),
                        cols: conj(rows),
                    }
                }
            }
            Repr::Lazy { row, col } => {
                if semiring.has_trivial_involution() {
                    Repr::Lazy {
                        row: col.clone(),
                        col: row.clone(),
                    }
                } else {
                    let (row, col) = (row.clone(), col.clone());
                    Repr::Lazy {
                        row: Arc::new(move |y| col(y).conj()),
                        col: Arc::new(move |x| row(x).conj()),
                    }
                }
            }
        };
        Rel {
            semiring,
            dom: self.cod.clone(),
            cod: self.dom.clone(),
            repr,
            builtin: None,
        }
    }

    /// Entrywise conjugate `r(x, y) ↦ conj(r(x, y))` (same direction).
    pub fn conj(&self) -> Rel {
        self.dagger().transpose()
    }

    /// `rᵀ(y, x) = r(x, y)`, without conjugation.
    pub fn transpose(&self) -> Rel {
        let repr = match &self.repr {
            Repr::Explicit { rows, cols } => Repr::Explicit {
                rows: cols.clone(),
                cols: rows.clone(),
            },
            Repr::Lazy { row, col } => Repr::Lazy {
                row: col.clone(),
                col: row.clone(),
            },
        };
        Rel {
            semiring: self.semiring,
            dom: self.cod.clone(),
            cod: self.dom.clone(),
            repr,
            builtin: None,
        }
    }

    /// Pointwise sum `r + s`.
    pub fn add(&self, s: &Rel) -> Result<Rel> {
        hom_add(self, s)
    }

    /// Multiplies every entry by `c`.
    pub fn scale(&self, c: &Value) -> Result<Rel> {
        if c.semiring() != self.semiring {
            return Err(Error::MixedSemiring(self.semiring, c.semiring()));
        }
        let semiring = self.semiring;
        Ok(match &self.repr {
            Repr::Explicit { rows, .. } => {
                let rows = rows.iter().map(|(x, r)| (x.clone(), r.scale(c))).collect();
                Self::explicit_from_rows(semiring, self.dom.clone(), self.cod.clone(), rows)
            }
            Repr::Lazy { row, col } => {
                let (row, col) = (row.clone(), col.clone());
                let (c1, c2) = (c.clone(), c.clone());
                Rel::lazy(
                    semiring,
                    self.dom.clone(),
                    self.cod.clone(),
                    move |x| row(x).scale(&c1),
                    move |y| col(y).scale(&c2),
                )
            }
        })
    }

    /// Drops float entries of magnitude at most `tol` (explicit relations;
    /// lazy ones are returned unchanged).
    pub fn chop(&self, tol: f64) -> Rel {
        match &self.repr {
            Repr::Explicit { rows, .. } if self.semiring.is_float() => {
                let rows = rows.iter().map(|(x, r)| (x.clone(), r.chop(tol))).collect();
                Self::explicit_from_rows(self.semiring, self.dom.clone(), self.cod.clone(), rows)
            }
            _ => self.clone(),
        }
    }

    /// Reinterprets the entries in another semiring through `f`.
    pub fn map_values(&self, semiring: Semiring, f: impl Fn(&Value) -> Value + Send + Sync + 'static) -> Result<Rel> {
        match &self.repr {
            Repr::Explicit { rows, .. } => {
                let rows = rows
                    .iter()
                    .map(|(x, r)| (x.clone(), r.map_values(semiring, &f)))
                    .collect();
                Ok(Self::explicit_from_rows(semiring, self.dom.clone(), self.cod.clone(), rows))
            }
            Repr::Lazy { row, col } => {
                let (row, col) = (row.clone(), col.clone());
                let f = Arc::new(f);
                let g = f.clone();
                Ok(Rel::lazy(
                    semiring,
                    self.dom.clone(),
                    self.cod.clone(),
                    move |x| row(x).map_values(semiring, |v| f(v)),
                    move |y| col(y).map_values(semiring, |v| g(v)),
                ))
            }
        }
    }
}

/// `s ∘ r`: `(s∘r)(x, z) = Σ_y r(x, y)·s(y, z)`.
///
/// The result is explicit when either factor is; rows (or columns) are
/// pushed through the other factor, so the sum only ever ranges over the
/// finite supports involved.
pub fn compose(r: &Rel, s: &Rel) -> Result<Rel> {
    r.check_same_semiring(s)?;
    if r.cod != s.dom {
        return Err(Error::CarrierMismatch(format!(
            "cannot compose {} → {} with {} → {}",
            r.dom, r.cod, s.dom, s.cod
        )));
    }
    let semiring = r.semiring;
    let (dom, cod) = (r.dom.clone(), s.cod.clone());
    if let Some(rows) = r.explicit_rows() {
        let out = rows.iter().map(|(x, row)| (x.clone(), s.push(row))).collect();
        return Ok(Rel::explicit_from_rows(semiring, dom, cod, out));
    }
    if let Some(cols) = s.explicit_cols() {
        let out = cols.iter().map(|(z, col)| (z.clone(), r.pull(col))).collect();
        return Ok(Rel::explicit_from_cols(semiring, dom, cod, out));
    }
    let (r1, s1) = (r.clone(), s.clone());
    let (r2, s2) = (r.clone(), s.clone());
    Ok(Rel::lazy(
        semiring,
        dom,
        cod,
        move |x| s1.push(&r1.row(x)),
        move |z| r2.pull(&s2.col(z)),
    ))
}

/// Pointwise sum of two parallel relations.
pub fn hom_add(r: &Rel, s: &Rel) -> Result<Rel> {
    r.check_same_type(s)?;
    let semiring = r.semiring;
    if let (Some(ra), Some(sa)) = (r.explicit_rows(), s.explicit_rows()) {
        let mut rows = ra.clone();
        for (x, row) in sa {
            rows.entry(x.clone())
                .or_insert_with(|| FinMultiset::new(semiring))
                .add_assign_unchecked(row);
        }
        return Ok(Rel::explicit_from_rows(semiring, r.dom.clone(), r.cod.clone(), rows));
    }
    let (r1, s1, r2, s2) = (r.clone(), s.clone(), r.clone(), s.clone());
    Ok(Rel::lazy(
        semiring,
        r.dom.clone(),
        r.cod.clone(),
        move |x| {
            let mut m = r1.row(x).into_owned();
            m.add_assign_unchecked(&s1.row(x));
            m
        },
        move |y| {
            let mut m = r2.col(y).into_owned();
            m.add_assign_unchecked(&s2.col(y));
            m
        },
    ))
}

impl fmt::Debug for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_struct("Rel");
        d.field("semiring", &self.semiring)
            .field("dom", &self.dom)
            .field("cod", &self.cod);
        match &self.repr {
            Repr::Explicit { rows, .. } => d.field("rows", rows),
            Repr::Lazy { .. } => d.field("rows", &"<lazy>"),
        };
        if let Some(b) = &self.builtin {
            d.field("builtin", b);
        }
        d.finish()
    }
}

impl fmt::Display for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} → {} over {}", self.dom, self.cod, self.semiring)?;
        match &self.repr {
            Repr::Explicit { rows, .. } => {
                for (x, r) in rows.iter() {
                    writeln!(f, "  {x} ↦ {r}")?;
                }
                Ok(())
            }
            Repr::Lazy { .. } => writeln!(f, "  <lazy>"),
        }
    }
}
