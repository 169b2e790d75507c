//! Predicates: dagger monos/epis, unitaries, self-adjoints, projections,
//! unit states, squared-norm extraction and coherence of the two views.

use std::collections::{BTreeMap, BTreeSet};

use super::{compose, Rel};
use crate::carrier::Elem;
use crate::error::{Error, Result};
use crate::multiset::FinMultiset;
use crate::semiring::{Prob, Semiring, Value};

#[derive(Clone, Debug)]
pub struct ClassifyOptions {
    /// Absolute tolerance for float semirings; ignored for exact ones.
    pub tol: f64,
    /// For lazy relations over infinite carriers: the finite set of elements
    /// on which the defining equations are checked.
    pub window: Option<Vec<Elem>>,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            tol: 1e-9,
            window: None,
        }
    }
}

impl ClassifyOptions {
    pub fn with_tol(tol: f64) -> Self {
        ClassifyOptions { tol, window: None }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    /// `r†∘r = id`.
    pub dagger_mono: bool,
    /// `r∘r† = id`.
    pub dagger_epi: bool,
    pub unitary: bool,
    /// The row family `(r(x, −))ₓ` is orthonormal (independent route to
    /// `dagger_mono`).
    pub rows_orthonormal: bool,
    /// The column family is orthonormal (independent route to `dagger_epi`).
    pub cols_orthonormal: bool,
    /// `None` when the relation is not an endomap.
    pub self_adjoint: Option<bool>,
    pub projection: Option<bool>,
    /// Results were only verified on a window.
    pub partial: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CoherenceReport {
    pub checked: usize,
    /// `(x, y, row(x)(y), col(y)(x))` for every disagreement found.
    pub violations: Vec<(Elem, Elem, Value, Value)>,
}

impl CoherenceReport {
    pub fn is_coherent(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `(r†∘r)(u, v) = Σ_y r(u, y)·conj(r(v, y)) = ⟨r(v, −), r(u, −)⟩`.
fn gram_ok(vecs: &[(Elem, FinMultiset)], tol: f64) -> bool {
    let Some((_, first)) = vecs.first() else {
        return true;
    };
    let one = first.semiring().one();
    for (i, (_, u)) in vecs.iter().enumerate() {
        if !u.norm_sq().approx_eq(&one, tol) {
            return false;
        }
        for (_, v) in &vecs[i + 1..] {
            if !u.inner_unchecked(v).approx_zero(tol) {
                return false;
            }
        }
    }
    true
}

fn is_identity(r: &Rel, tol: f64) -> Result<bool> {
    r.approx_eq(&Rel::identity(r.semiring(), r.dom().clone()), tol)
}

impl Rel {
    /// Classifies the relation. Explicit relations and lazy relations with a
    /// finite domain and codomain are checked exhaustively; other lazy
    /// relations need `opts.window` and give a partial answer.
    pub fn classify(&self, opts: &ClassifyOptions) -> Result<Classification> {
        let tol = opts.tol;
        let square = self.dom() == self.cod();
        let finite = self.dom().is_finite() && self.cod().is_finite();
        if self.is_explicit() || finite {
            let r = self.to_explicit()?;
            let d = r.dagger();
            let xs = r.dom().elements();
            let ys = r.cod().elements();
            // An explicit relation on an infinite carrier has infinitely many
            // zero rows (or columns), which rules out isometry.
            let dagger_mono = match &xs {
                Some(_) => is_identity(&compose(&r, &d)?, tol)?,
                None => false,
            };
            let dagger_epi = match &ys {
                Some(_) => is_identity(&compose(&d, &r)?, tol)?,
                None => false,
            };
            let rows_orthonormal = match &xs {
                Some(xs) => gram_ok(&xs.iter().map(|x| (x.clone(), r.row(x).into_owned())).collect::<Vec<_>>(), tol),
                None => false,
            };
            let cols_orthonormal = match &ys {
                Some(ys) => gram_ok(&ys.iter().map(|y| (y.clone(), r.col(y).into_owned())).collect::<Vec<_>>(), tol),
                None => false,
            };
            let (self_adjoint, projection) = if square {
                let sa = r.approx_eq(&d, tol)?;
                let idem = compose(&r, &r)?.approx_eq(&r, tol)?;
                (Some(sa), Some(sa && idem))
            } else {
                (None, None)
            };
            return Ok(Classification {
                dagger_mono,
                dagger_epi,
                unitary: dagger_mono && dagger_epi,
                rows_orthonormal,
                cols_orthonormal,
                self_adjoint,
                projection,
                partial: false,
            });
        }
        let window = opts
            .window
            .as_ref()
            .ok_or_else(|| Error::InfiniteCarrier(format!("{} → {} (no window given)", self.dom(), self.cod())))?;
        let xs: Vec<Elem> = window.iter().filter(|e| self.dom().contains(e)).cloned().collect();
        let ys: Vec<Elem> = window.iter().filter(|e| self.cod().contains(e)).cloned().collect();
        let rows: Vec<(Elem, FinMultiset)> = xs.iter().map(|x| (x.clone(), self.row(x).into_owned())).collect();
        let cols: Vec<(Elem, FinMultiset)> = ys.iter().map(|y| (y.clone(), self.col(y).into_owned())).collect();
        let rows_orthonormal = gram_ok(&rows, tol);
        let cols_orthonormal = gram_ok(&cols, tol);
        let (self_adjoint, projection) = if square {
            let d = self.dagger();
            let sa = xs.iter().all(|x| self.row(x).approx_eq(&d.row(x), tol));
            let idem = xs.iter().all(|x| {
                let rr = self.push(&self.row(x));
                rr.approx_eq(&self.row(x), tol)
            });
            (Some(sa), Some(sa && idem))
        } else {
            (None, None)
        };
        Ok(Classification {
            dagger_mono: rows_orthonormal,
            dagger_epi: cols_orthonormal,
            unitary: rows_orthonormal && cols_orthonormal,
            rows_orthonormal,
            cols_orthonormal,
            self_adjoint,
            projection,
            partial: true,
        })
    }

    pub fn is_dagger_mono(&self, tol: f64) -> Result<bool> {
        Ok(self.classify(&ClassifyOptions::with_tol(tol))?.dagger_mono)
    }

    pub fn is_dagger_epi(&self, tol: f64) -> Result<bool> {
        Ok(self.classify(&ClassifyOptions::with_tol(tol))?.dagger_epi)
    }

    pub fn is_unitary(&self, tol: f64) -> Result<bool> {
        Ok(self.classify(&ClassifyOptions::with_tol(tol))?.unitary)
    }

    pub fn is_self_adjoint(&self, tol: f64) -> Result<bool> {
        self.classify(&ClassifyOptions::with_tol(tol))?
            .self_adjoint
            .ok_or(Error::NonSquare)
    }

    pub fn is_projection(&self, tol: f64) -> Result<bool> {
        self.classify(&ClassifyOptions::with_tol(tol))?
            .projection
            .ok_or(Error::NonSquare)
    }

    /// Entrywise squared norms `‖r(x, y)‖²` as a probability-valued relation
    /// (`rat` for exact semirings, `f64` for float ones). Every row and
    /// column of the result is re-checked to sum to 1 (within `tol`).
    pub fn norm_sq_extract(&self, tol: f64) -> Result<Rel> {
        let r = self.to_explicit()?;
        let target = if self.semiring().is_float() {
            Semiring::F64
        } else {
            Semiring::Rat
        };
        let (Some(xs), Some(ys)) = (r.dom().elements(), r.cod().elements()) else {
            return Err(Error::NotUnitary(
                "an explicit relation on an infinite carrier has zero rows or columns".into(),
            ));
        };
        let mut rows = BTreeMap::new();
        for (x, row) in r.explicit_rows().expect("explicit") {
            let mut out = FinMultiset::new(target);
            for (y, v) in row {
                out.insert_add(y.clone(), v.norm_sq().to_unit_interval()?.to_value());
            }
            rows.insert(x.clone(), out);
        }
        let p = Rel::from_rows(target, r.dom().clone(), r.cod().clone(), rows)?;
        let sums_to_one = |m: &FinMultiset| {
            let mut acc = match target {
                Semiring::F64 => Prob::Float(0.0),
                _ => Prob::Exact(num_rational::BigRational::from_integer(0.into())),
            };
            for (_, v) in m {
                acc = acc.add(&v.to_unit_interval().expect("probability"));
            }
            acc.is_one(tol)
        };
        for x in &xs {
            if !sums_to_one(&p.row(x)) {
                return Err(Error::NotUnitary(format!("row {x} does not sum to 1")));
            }
        }
        for y in &ys {
            if !sums_to_one(&p.col(y)) {
                return Err(Error::NotUnitary(format!("column {y} does not sum to 1")));
            }
        }
        Ok(p)
    }

    /// For `q: 1 → X`: whether `Σₓ ‖q(*, x)‖² = 1`.
    pub fn is_unit_state(&self, tol: f64) -> bool {
        let row = self.row(&Elem::Star);
        row.norm_sq().approx_eq(&self.semiring().one(), tol)
    }

    /// Checks `row(x)(y) = col(y)(x)`. Explicit relations are checked on every
    /// stored entry of both tables. Lazy ones are checked on the given
    /// samples and on everything one step away from them (the supports of
    /// their rows and columns, and the columns and rows at those points).
    pub fn check_coherent(&self, samples: &[Elem], tol: f64) -> CoherenceReport {
        let mut report = CoherenceReport::default();
        let check = |x: &Elem, y: &Elem, report: &mut CoherenceReport| {
            let a = self.row(x).get(y);
            let b = self.col(y).get(x);
            report.checked += 1;
            if !a.approx_eq(&b, tol) {
                report.violations.push((x.clone(), y.clone(), a, b));
            }
        };
        if let (Some(rows), Some(cols)) = (self.explicit_rows(), self.explicit_cols()) {
            let mut pairs = BTreeSet::new();
            for (x, r) in rows {
                pairs.extend(r.support().map(|y| (x.clone(), y.clone())));
            }
            for (y, c) in cols {
                pairs.extend(c.support().map(|x| (x.clone(), y.clone())));
            }
            for (x, y) in &pairs {
                check(x, y, &mut report);
            }
            return report;
        }
        let mut pairs = BTreeSet::new();
        for s in samples {
            if self.dom().contains(s) {
                for y in self.row(s).support() {
                    pairs.insert((s.clone(), y.clone()));
                    for x2 in self.col(y).support() {
                        pairs.insert((x2.clone(), y.clone()));
                    }
                }
            }
            if self.cod().contains(s) {
                for x in self.col(s).support() {
                    pairs.insert((x.clone(), s.clone()));
                    for y2 in self.row(x).support() {
                        pairs.insert((x.clone(), y2.clone()));
                    }
                }
            }
        }
        for (x, y) in &pairs {
            check(x, y, &mut report);
        }
        report
    }
}
