//! Dagger kernels of relations between finite carriers over fields.
//!
//! For `r: X → Y` let `X_r` be the set of `x` with a nonzero row. The left
//! null space `{φ ∈ M(X_r) : Σₓ φ(x)·r(x, y) = 0 for all y}` is computed by
//! Gaussian elimination and orthonormalized by Gram–Schmidt into `B_r`. The
//! kernel object is `(X − X_r) ∪ B_r` and the kernel map sends an untouched
//! `x` to `1·x` and a basis vector `φ` to `φ` itself.

use std::collections::{BTreeMap, BTreeSet};

use crate::carrier::{BasisExtension, Carrier, Elem};
use crate::error::{Error, Result};
use crate::multiset::FinMultiset;
use crate::rel::{compose, Rel};
use crate::semiring::{Semiring, Value};

fn require_field(s: Semiring) -> Result<()> {
    if s.has_division() {
        Ok(())
    } else {
        Err(Error::NotAField(s))
    }
}

/// Elements with a nonzero row, in canonical order.
fn touched(r: &Rel) -> Vec<Elem> {
    r.explicit_rows()
        .expect("explicit")
        .iter()
        .filter(|(_, row)| !row.is_empty())
        .map(|(x, _)| x.clone())
        .collect()
}

/// Basis of the null space of a dense matrix (rows are equations), as
/// coefficient vectors indexed by column. Float pivots at most
/// `tol · max|initial column|` count as zero.
fn nullspace(semiring: Semiring, mut a: Vec<Vec<Value>>, ncols: usize, tol: f64) -> Vec<Vec<Value>> {
    let zero = semiring.zero();
    let float = semiring.is_float();
    let col_scale: Vec<f64> = (0..ncols)
        .map(|c| a.iter().map(|row| row[c].magnitude()).fold(0.0, f64::max))
        .collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0;
    for c in 0..ncols {
        if rank == a.len() {
            break;
        }
        let candidate = if float {
            (rank..a.len())
                .max_by(|&i, &j| a[i][c].magnitude().total_cmp(&a[j][c].magnitude()))
                .filter(|&i| a[i][c].magnitude() > tol * col_scale[c])
        } else {
            (rank..a.len()).find(|&i| !a[i][c].is_zero())
        };
        let Some(p) = candidate else {
            if float {
                for row in a.iter_mut().skip(rank) {
                    row[c] = zero.clone();
                }
            }
            continue;
        };
        a.swap(rank, p);
        let inv = a[rank][c].inv().expect("nonzero pivot in a field");
        for v in a[rank].iter_mut() {
            *v = v.mul(&inv);
        }
        a[rank][c] = semiring.one();
        let pivot_row = a[rank].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == rank || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v = v.sub(&f.mul(pv)).expect("field");
            }
            row[c] = zero.clone();
        }
        pivots.push(c);
        rank += 1;
    }
    let mut basis = Vec::new();
    let pivot_set: BTreeSet<usize> = pivots.iter().copied().collect();
    for free in (0..ncols).filter(|c| !pivot_set.contains(c)) {
        let mut v = vec![zero.clone(); ncols];
        v[free] = semiring.one();
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = a[i][free].neg().expect("field");
        }
        basis.push(v);
    }
    basis
}

/// A linearly independent spanning set of the left null space of `r`,
/// supported inside the touched set `X_r`.
pub fn left_nullspace_basis(r: &Rel, tol: f64) -> Result<Vec<FinMultiset>> {
    let semiring = r.semiring();
    require_field(semiring)?;
    r.dom().require_elements()?;
    let r = r.to_explicit()?;
    let vars = touched(&r);
    let cols = r.explicit_cols().expect("explicit");
    let a: Vec<Vec<Value>> = cols
        .values()
        .map(|col| vars.iter().map(|x| col.get(x)).collect())
        .collect();
    let basis = nullspace(semiring, a, vars.len(), tol);
    Ok(basis
        .into_iter()
        .map(|v| {
            FinMultiset::from_pairs(semiring, vars.iter().cloned().zip(v)).expect("one semiring")
        })
        .collect())
}

/// Output of [`gram_schmidt`]. `normalized[i]` is false when the residual
/// norm of vector `i` has no square root in the semiring; that vector is
/// then orthogonal to the others but not of norm 1.
#[derive(Clone, Debug)]
pub struct GramSchmidt {
    pub vectors: Vec<FinMultiset>,
    pub normalized: Vec<bool>,
}

impl GramSchmidt {
    pub fn all_normalized(&self) -> bool {
        self.normalized.iter().all(|b| *b)
    }
}

/// Orthogonalizes `vs` (modified Gram–Schmidt on the unnormalized residuals)
/// and then normalizes each vector where possible. A residual that vanishes
/// (exactly, or below `tol` relative to the input norm for floats) signals
/// dependent input.
pub fn gram_schmidt(vs: &[FinMultiset], tol: f64) -> Result<GramSchmidt> {
    let Some(first) = vs.first() else {
        return Ok(GramSchmidt {
            vectors: vec![],
            normalized: vec![],
        });
    };
    let semiring = first.semiring();
    require_field(semiring)?;
    let mut ortho: Vec<(FinMultiset, Value)> = Vec::with_capacity(vs.len());
    for (k, v) in vs.iter().enumerate() {
        if v.semiring() != semiring {
            return Err(Error::MixedSemiring(semiring, v.semiring()));
        }
        let mut w = v.clone();
        for (u, nu) in &ortho {
            let c = u.inner_unchecked(&w).div(nu)?;
            w.axpy(&c.neg()?, u);
        }
        let nw = w.norm_sq();
        let dependent = if semiring.is_float() {
            nw.magnitude().sqrt() <= tol * v.norm_sq().magnitude().sqrt() || nw.is_zero()
        } else {
            nw.is_zero()
        };
        if dependent {
            return Err(Error::DependentInput(k));
        }
        ortho.push((w, nw));
    }
    let mut vectors = Vec::with_capacity(ortho.len());
    let mut normalized = Vec::with_capacity(ortho.len());
    for (w, nw) in ortho {
        match nw.sqrt_nonneg() {
            Ok(root) => {
                vectors.push(w.scale(&root.inv()?));
                normalized.push(true);
            }
            Err(Error::NotRepresentable(_)) => {
                vectors.push(w);
                normalized.push(false);
            }
            Err(e) => return Err(e),
        }
    }
    Ok(GramSchmidt { vectors, normalized })
}

#[derive(Clone, Debug)]
pub struct KernelResult {
    /// The relation whose kernel this is.
    pub source: Rel,
    /// `X_r`: domain elements with a nonzero row.
    pub touched: BTreeSet<Elem>,
    /// `B_r`: orthonormal (or, if `normalized` is false, orthogonal) basis
    /// of the left null space, supported in `touched`.
    pub basis: Vec<FinMultiset>,
    pub kernel_object: Carrier,
    /// `k: kernel_object → X`.
    pub kernel_map: Rel,
    pub normalized: bool,
}

impl KernelResult {
    /// Rebuilds a kernel from its map `k: K → X` alone, as read back from a
    /// file. The source becomes the complementary projection
    /// `id − k†·D⁻¹·k` (with `D = k∘k†` diagonal), whose kernel is `k`.
    pub fn from_kernel_map(kmap: &Rel, tol: f64) -> Result<KernelResult> {
        let semiring = kmap.semiring();
        require_field(semiring)?;
        let ext = match kmap.dom() {
            Carrier::BasisExtension(ext) => ext.clone(),
            c => return Err(Error::InvalidArgument(format!("{c} is not a kernel object"))),
        };
        if kmap.cod() != &ext.base {
            return Err(Error::CarrierMismatch(format!("{} does not map into {}", kmap.dom(), ext.base)));
        }
        let mut rows = BTreeMap::new();
        let mut normalized = true;
        for e in kmap.dom().elements().expect("finite") {
            let want = match &e {
                Elem::Pass(x) => FinMultiset::unit(semiring, (**x).clone()),
                Elem::Adjoined(i) => ext.adjoined[*i as usize].clone(),
                _ => unreachable!("basis extension elements"),
            };
            let row = kmap.row(&e).into_owned();
            if !row.approx_eq(&want, tol) {
                return Err(Error::InvalidArgument(format!("row {e:?} disagrees with the kernel object")));
            }
            let n = row.norm_sq();
            normalized &= n.approx_eq(&semiring.one(), tol);
            rows.insert(e, row.scale(&n.inv()?));
        }
        let scaled = Rel::from_rows(semiring, kmap.dom().clone(), ext.base.clone(), rows)?;
        let proj = compose(&kmap.dagger(), &scaled)?;
        let source = Rel::identity(semiring, ext.base.clone()).add(&proj.scale(&semiring.one().neg()?)?)?.chop(tol);
        Ok(KernelResult {
            source,
            touched: ext.removed.clone(),
            basis: ext.adjoined.clone(),
            kernel_object: kmap.dom().clone(),
            kernel_map: kmap.clone(),
            normalized,
        })
    }
}

/// The dagger kernel of `r: X → Y` for finite `X` over a field.
///
/// When an exact-field residual norm has no square root the orthogonal
/// result is returned inside [`Error::NormalizationFailed`]; `r∘k = 0` and
/// orthogonality still hold for it, but `k†∘k` is only diagonal.
pub fn dagger_kernel(r: &Rel, tol: f64) -> Result<KernelResult> {
    let semiring = r.semiring();
    require_field(semiring)?;
    let base = r.dom().clone();
    base.require_elements()?;
    let rx = r.to_explicit()?;
    let touched_set: BTreeSet<Elem> = touched(&rx).into_iter().collect();
    let null = left_nullspace_basis(&rx, tol)?;
    let gs = gram_schmidt(&null, tol)?;
    let normalized = gs.all_normalized();
    let basis = gs.vectors;
    let ext = BasisExtension {
        base: base.clone(),
        removed: touched_set.clone(),
        adjoined: basis.clone(),
    };
    let kernel_object = Carrier::BasisExtension(std::sync::Arc::new(ext));
    let mut rows = BTreeMap::new();
    for e in kernel_object.elements().expect("finite") {
        let row = match &e {
            Elem::Pass(x) => FinMultiset::unit(semiring, (**x).clone()),
            Elem::Adjoined(i) => basis[*i as usize].clone(),
            _ => unreachable!("basis extension elements"),
        };
        rows.insert(e, row);
    }
    let kernel_map = Rel::from_rows(semiring, kernel_object.clone(), base, rows)?;
    let result = KernelResult {
        source: r.clone(),
        touched: touched_set,
        basis,
        kernel_object,
        kernel_map,
        normalized,
    };
    if normalized {
        Ok(result)
    } else {
        Err(Error::NormalizationFailed(Box::new(result)))
    }
}

fn all_zero(r: &Rel, tol: f64) -> Result<bool> {
    Ok(r
        .entries()?
        .iter()
        .all(|(_, _, v)| v.approx_zero(tol)))
}

/// The mediating map `t′` with `k∘t′ = t`, for `t: Z → X` with `r∘t = 0`.
pub fn factor_through_kernel(k: &KernelResult, t: &Rel, tol: f64) -> Result<Rel> {
    if t.cod() != k.source.dom() {
        return Err(Error::CarrierMismatch(format!(
            "{} does not map into {}",
            t.cod(),
            k.source.dom()
        )));
    }
    if !all_zero(&compose(t, &k.source)?, tol)? {
        return Err(Error::NotInKernel("r∘t is nonzero".into()));
    }
    let kmap = &k.kernel_map;
    let mut t1 = compose(t, &kmap.dagger())?;
    if !k.normalized {
        // k†∘k is diagonal with ‖φ‖² on the adjoined vectors; undo it.
        let mut rows = BTreeMap::new();
        let weights: Vec<Value> = k
            .basis
            .iter()
            .map(|phi| phi.norm_sq().inv())
            .collect::<Result<_>>()?;
        for (z, row) in t1.explicit_rows().expect("explicit") {
            let mut m = FinMultiset::new(t1.semiring());
            for (e, v) in row {
                let w = match e {
                    Elem::Adjoined(i) => v.mul(&weights[*i as usize]),
                    _ => v.clone(),
                };
                m.insert_add(e.clone(), w);
            }
            rows.insert(z.clone(), m);
        }
        t1 = Rel::from_rows(t1.semiring(), t1.dom().clone(), t1.cod().clone(), rows)?;
    }
    let t1 = t1.chop(0.0);
    let back = compose(&t1, kmap)?;
    if !back.approx_eq(t, tol)? {
        return Err(Error::NotInKernel("k∘t′ differs from t beyond tolerance".into()));
    }
    Ok(t1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::Semiring::*;

    /// `r(2y, y) = 1`, `r(2y+1, y) = −1` on `{0..5} → {0,1,2}`.
    fn kernel_example(s: Semiring) -> Rel {
        let x = Carrier::numbered("x", 6);
        let y = Carrier::numbered("y", 3);
        let one = s.one();
        let minus = one.neg().unwrap();
        let entries = (0..3).flat_map(|i| {
            [
                (x.at(&format!("x{}", 2 * i)), y.at(&format!("y{i}")), one.clone()),
                (x.at(&format!("x{}", 2 * i + 1)), y.at(&format!("y{i}")), minus.clone()),
            ]
        });
        Rel::from_entries(s, x.clone(), y.clone(), entries.collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn identity_has_trivial_nullspace() {
        let id = Rel::identity(Rat, Carrier::numbered("a", 2));
        assert!(left_nullspace_basis(&id, 0.0).unwrap().is_empty());
    }

    #[test]
    fn zero_relation_touches_nothing() {
        let z = Rel::zero(Rat, Carrier::numbered("a", 2), Carrier::numbered("b", 3));
        assert!(left_nullspace_basis(&z, 0.0).unwrap().is_empty());
        let k = dagger_kernel(&z, 0.0).unwrap();
        assert!(k.touched.is_empty());
        let kk = compose(&k.kernel_map.dagger(), &k.kernel_map).unwrap();
        assert!(kk.approx_eq(&Rel::identity(Rat, z.dom().clone()), 0.0).unwrap());
    }

    #[test]
    fn rejects_non_fields() {
        let id = Rel::identity(Int, Carrier::numbered("a", 2));
        assert!(matches!(left_nullspace_basis(&id, 0.0), Err(Error::NotAField(Int))));
    }

    #[test]
    fn example_nullspace_dimension() {
        let r = kernel_example(Rat);
        let b = left_nullspace_basis(&r, 0.0).unwrap();
        assert_eq!(b.len(), 3);
        for phi in &b {
            assert!(r.apply_state(phi).unwrap().is_empty());
        }
    }

    #[test]
    fn gram_schmidt_cases() {
        let (x, y) = (Elem::Int(0), Elem::Int(1));
        let gs = gram_schmidt(&[FinMultiset::unit(Rat, x.clone()), FinMultiset::unit(Rat, y.clone())], 0.0).unwrap();
        assert_eq!(gs.vectors[0], FinMultiset::unit(Rat, x.clone()));
        let v1 = FinMultiset::from_pairs(F64, [(x.clone(), Value::F64(1.0)), (y.clone(), Value::F64(1.0))]).unwrap();
        let v2 = FinMultiset::from_pairs(F64, [(x.clone(), Value::F64(1.0))]).unwrap();
        let gs = gram_schmidt(&[v1, v2], 1e-12).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(gs.vectors[0].get(&x).approx_eq(&Value::F64(h), 1e-12));
        assert!(gs.vectors[0].get(&y).approx_eq(&Value::F64(h), 1e-12));
        assert!(gs.vectors[1].get(&x).approx_eq(&Value::F64(h), 1e-12));
        assert!(gs.vectors[1].get(&y).approx_eq(&Value::F64(-h), 1e-12));
        let one = Value::qsqrt2((1, 1), (0, 1));
        let v = FinMultiset::from_pairs(QSqrt2, [(x.clone(), one.clone()), (y.clone(), one)]).unwrap();
        let gs = gram_schmidt(&[v], 0.0).unwrap();
        assert_eq!(gs.vectors[0].get(&x), Value::qsqrt2((0, 1), (1, 2)));
        let d = FinMultiset::unit(Rat, x);
        assert!(matches!(gram_schmidt(&[d.clone(), d], 0.0), Err(Error::DependentInput(1))));
    }

    #[test]
    fn rational_normalization_fails_softly() {
        let r = kernel_example(Rat);
        match dagger_kernel(&r, 0.0) {
            Err(Error::NormalizationFailed(partial)) => {
                assert_eq!(partial.basis.len(), 3);
                let rk = compose(&partial.kernel_map, &r).unwrap();
                assert_eq!(rk.support_size(), Some(0));
            }
            other => panic!("expected a soft failure, got {other:?}"),
        }
    }

    #[test]
    fn example_kernel_exact() {
        let r = kernel_example(QSqrt2);
        let k = dagger_kernel(&r, 0.0).unwrap();
        assert_eq!(k.basis.len(), 3);
        let km = &k.kernel_map;
        assert_eq!(compose(km, &r).unwrap().support_size(), Some(0));
        let ktk = compose(km, &km.dagger()).unwrap();
        assert!(ktk.approx_eq(&Rel::identity(QSqrt2, k.kernel_object.clone()), 0.0).unwrap());
    }

    #[test]
    fn factoring() {
        let r = kernel_example(QSqrt2);
        let k = dagger_kernel(&r, 0.0).unwrap();
        let t1 = factor_through_kernel(&k, &k.kernel_map, 0.0).unwrap();
        assert!(t1.approx_eq(&Rel::identity(QSqrt2, k.kernel_object.clone()), 0.0).unwrap());
        let z = Rel::zero(QSqrt2, Carrier::Unit, r.dom().clone());
        assert_eq!(factor_through_kernel(&k, &z, 0.0).unwrap().support_size(), Some(0));
        let bad = Rel::identity(QSqrt2, r.dom().clone());
        assert!(matches!(factor_through_kernel(&k, &bad, 0.0), Err(Error::NotInKernel(_))));
    }

    #[test]
    fn unitary_has_zero_kernel() {
        let c = Carrier::numbered("a", 3);
        let k = dagger_kernel(&Rel::identity(Rat, c), 0.0).unwrap();
        assert!(k.basis.is_empty());
        assert_eq!(k.kernel_object.size(), Some(0));
    }
}
