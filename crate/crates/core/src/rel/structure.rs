//! Monoidal, biproduct and compact structure.

use std::collections::BTreeMap;

use super::{compose, hom_add, Rel};
use crate::carrier::{Carrier, Elem};
use crate::error::{Error, Result};
use crate::multiset::FinMultiset;
use crate::semiring::Semiring;

fn tensor_ms(a: &FinMultiset, b: &FinMultiset) -> FinMultiset {
    let mut out = FinMultiset::new(a.semiring());
    for (x, v) in a {
        for (y, w) in b {
            out.insert_add(Elem::pair(x.clone(), y.clone()), v.mul(w));
        }
    }
    out
}

impl Rel {
    /// `r₁ ⊗ r₂: X₁×X₂ → Y₁×Y₂`, entry `r₁(x₁, y₁)·r₂(x₂, y₂)`.
    pub fn tensor(&self, r2: &Rel) -> Result<Rel> {
        self.check_same_semiring(r2)?;
        let semiring = self.semiring;
        let dom = Carrier::pair(self.dom.clone(), r2.dom.clone());
        let cod = Carrier::pair(self.cod.clone(), r2.cod.clone());
        if let (Some(a), Some(b)) = (self.explicit_rows(), r2.explicit_rows()) {
            let mut rows = BTreeMap::new();
            for (x1, row1) in a {
                for (x2, row2) in b {
                    rows.insert(Elem::pair(x1.clone(), x2.clone()), tensor_ms(row1, row2));
                }
            }
            return Ok(Rel::explicit_from_rows(semiring, dom, cod, rows));
        }
        let (a1, b1, a2, b2) = (self.clone(), r2.clone(), self.clone(), r2.clone());
        Ok(Rel::lazy(
            semiring,
            dom,
            cod,
            move |x| match x.as_pair() {
                Some((x1, x2)) => tensor_ms(&a1.row(x1), &b1.row(x2)),
                None => FinMultiset::new(semiring),
            },
            move |y| match y.as_pair() {
                Some((y1, y2)) => tensor_ms(&a2.col(y1), &b2.col(y2)),
                None => FinMultiset::new(semiring),
            },
        ))
    }

    /// `κᵢ: Xᵢ → X₁ + X₂`.
    pub fn coprojection(semiring: Semiring, i: usize, x1: Carrier, x2: Carrier) -> Result<Rel> {
        if i != 1 && i != 2 {
            return Err(Error::InvalidArgument(format!("coprojection index {i} is not 1 or 2")));
        }
        let xi = if i == 1 { x1.clone() } else { x2.clone() };
        Ok(Rel::graph(
            semiring,
            xi,
            Carrier::sum(x1, x2),
            move |x| Some(Elem::inj(i, x.clone())),
            move |u| match u.as_inj() {
                Some((j, x)) if j == i => Some(x.clone()),
                _ => None,
            },
        ))
    }

    /// `πᵢ = κᵢ†: X₁ + X₂ → Xᵢ`.
    pub fn projection(semiring: Semiring, i: usize, x1: Carrier, x2: Carrier) -> Result<Rel> {
        Ok(Rel::coprojection(semiring, i, x1, x2)?.dagger())
    }

    /// `⟨r₁, r₂⟩: Z → X₁ + X₂`, entry `(z, κᵢx) ↦ rᵢ(z, x)`.
    pub fn tuple(r1: &Rel, r2: &Rel) -> Result<Rel> {
        r1.check_same_semiring(r2)?;
        if r1.dom != r2.dom {
            return Err(Error::CarrierMismatch(format!("tuple domains {} and {}", r1.dom, r2.dom)));
        }
        let s = r1.semiring;
        let k1 = Rel::coprojection(s, 1, r1.cod.clone(), r2.cod.clone())?;
        let k2 = Rel::coprojection(s, 2, r1.cod.clone(), r2.cod.clone())?;
        hom_add(&compose(r1, &k1)?, &compose(r2, &k2)?)
    }

    /// `[t₁, t₂]: X₁ + X₂ → Z`, entry `(κᵢx, z) ↦ tᵢ(x, z)`.
    pub fn cotuple(t1: &Rel, t2: &Rel) -> Result<Rel> {
        t1.check_same_semiring(t2)?;
        if t1.cod != t2.cod {
            return Err(Error::CarrierMismatch(format!("cotuple codomains {} and {}", t1.cod, t2.cod)));
        }
        let s = t1.semiring;
        let p1 = Rel::projection(s, 1, t1.dom.clone(), t2.dom.clone())?;
        let p2 = Rel::projection(s, 2, t1.dom.clone(), t2.dom.clone())?;
        hom_add(&compose(&p1, t1)?, &compose(&p2, t2)?)
    }

    /// `r₁ ⊕ r₂: X₁ + X₂ → Y₁ + Y₂`.
    pub fn oplus(&self, r2: &Rel) -> Result<Rel> {
        self.check_same_semiring(r2)?;
        let s = self.semiring;
        let k1 = Rel::coprojection(s, 1, self.cod.clone(), r2.cod.clone())?;
        let k2 = Rel::coprojection(s, 2, self.cod.clone(), r2.cod.clone())?;
        Rel::cotuple(&compose(self, &k1)?, &compose(r2, &k2)?)
    }

    /// `λ: 1 × X → X`.
    pub fn lambda_unit(semiring: Semiring, x: Carrier) -> Rel {
        Rel::graph(
            semiring,
            Carrier::pair(Carrier::Unit, x.clone()),
            x,
            |u| u.as_pair().filter(|(s, _)| **s == Elem::Star).map(|(_, e)| e.clone()),
            |e| Some(Elem::pair(Elem::Star, e.clone())),
        )
    }

    /// `ρ: X × 1 → X`.
    pub fn rho_unit(semiring: Semiring, x: Carrier) -> Rel {
        Rel::graph(
            semiring,
            Carrier::pair(x.clone(), Carrier::Unit),
            x,
            |u| u.as_pair().filter(|(_, s)| **s == Elem::Star).map(|(e, _)| e.clone()),
            |e| Some(Elem::pair(e.clone(), Elem::Star)),
        )
    }

    /// `α: (X × Y) × Z → X × (Y × Z)`.
    pub fn assoc(semiring: Semiring, x: Carrier, y: Carrier, z: Carrier) -> Rel {
        Rel::graph(
            semiring,
            Carrier::pair(Carrier::pair(x.clone(), y.clone()), z.clone()),
            Carrier::pair(x, Carrier::pair(y, z)),
            |u| {
                let (xy, c) = u.as_pair()?;
                let (a, b) = xy.as_pair()?;
                Some(Elem::pair(a.clone(), Elem::pair(b.clone(), c.clone())))
            },
            |v| {
                let (a, yz) = v.as_pair()?;
                let (b, c) = yz.as_pair()?;
                Some(Elem::pair(Elem::pair(a.clone(), b.clone()), c.clone()))
            },
        )
    }

    /// `γ: X × Y → Y × X`.
    pub fn gamma_swap(semiring: Semiring, x: Carrier, y: Carrier) -> Rel {
        let swap = |u: &Elem| u.as_pair().map(|(a, b)| Elem::pair(b.clone(), a.clone()));
        Rel::graph(
            semiring,
            Carrier::pair(x.clone(), y.clone()),
            Carrier::pair(y, x),
            swap,
            swap,
        )
    }

    /// `X × (Y₁ + Y₂) → (X × Y₁) + (X × Y₂)`.
    pub fn distribute(semiring: Semiring, x: Carrier, y1: Carrier, y2: Carrier) -> Rel {
        Rel::graph(
            semiring,
            Carrier::pair(x.clone(), Carrier::sum(y1.clone(), y2.clone())),
            Carrier::sum(Carrier::pair(x.clone(), y1), Carrier::pair(x, y2)),
            |u| {
                let (a, s) = u.as_pair()?;
                let (i, b) = s.as_inj()?;
                Some(Elem::inj(i, Elem::pair(a.clone(), b.clone())))
            },
            |v| {
                let (i, p) = v.as_inj()?;
                let (a, b) = p.as_pair()?;
                Some(Elem::pair(a.clone(), Elem::inj(i, b.clone())))
            },
        )
    }

    /// Trace over a finite `A` of `s: X × A → Y × A`:
    /// `tr(s)(x, y) = Σ_a s((x, a), (y, a))`.
    ///
    /// With `normalized` the sum is further divided by `#A·1`. That variant
    /// does not satisfy yanking (`tr(γ_{A,A}) = (1/#A)·id`) and is kept only
    /// for comparison. An empty `A` gives the zero map.
    pub fn trace(&self, normalized: bool) -> Result<Rel> {
        let (Some((x, a)), Some((y, a2))) = (self.dom.as_pair(), self.cod.as_pair()) else {
            return Err(Error::CarrierMismatch(format!(
                "trace needs X × A → Y × A, got {} → {}",
                self.dom, self.cod
            )));
        };
        if a != a2 {
            return Err(Error::CarrierMismatch(format!("traced components {a} and {a2} differ")));
        }
        let elems = a.require_elements()?;
        let semiring = self.semiring;
        if normalized && !semiring.has_division() {
            return Err(Error::DivisionUnavailable(semiring));
        }
        let (x, y) = (x.clone(), y.clone());
        if elems.is_empty() {
            return Ok(Rel::zero(semiring, x, y));
        }
        let factor = if normalized {
            let n = semiring.from_i64(elems.len() as i64)?;
            Some(n.inv()?)
        } else {
            None
        };
        let out = if let Some(rows) = self.explicit_rows() {
            let mut acc: BTreeMap<Elem, FinMultiset> = BTreeMap::new();
            for (u, row) in rows {
                let (xe, ae) = u.as_pair().expect("pair carrier");
                for (v, val) in row {
                    let (ye, be) = v.as_pair().expect("pair carrier");
                    if ae == be {
                        acc.entry(xe.clone())
                            .or_insert_with(|| FinMultiset::new(semiring))
                            .insert_add(ye.clone(), val.clone());
                    }
                }
            }
            Rel::explicit_from_rows(semiring, x, y, acc)
        } else {
            let (s1, s2) = (self.clone(), self.clone());
            let (e1, e2) = (elems.clone(), elems);
            Rel::lazy(
                semiring,
                x,
                y,
                move |xe| {
                    let mut m = FinMultiset::new(semiring);
                    for ae in &e1 {
                        let row = s1.row(&Elem::pair(xe.clone(), ae.clone()));
                        for (v, val) in row.iter() {
                            if let Some((ye, be)) = v.as_pair() {
                                if be == ae {
                                    m.insert_add(ye.clone(), val.clone());
                                }
                            }
                        }
                    }
                    m
                },
                move |ye| {
                    let mut m = FinMultiset::new(semiring);
                    for ae in &e2 {
                        let col = s2.col(&Elem::pair(ye.clone(), ae.clone()));
                        for (u, val) in col.iter() {
                            if let Some((xe, be)) = u.as_pair() {
                                if be == ae {
                                    m.insert_add(xe.clone(), val.clone());
                                }
                            }
                        }
                    }
                    m
                },
            )
        };
        match factor {
            Some(c) => out.scale(&c),
            None => Ok(out),
        }
    }

    /// The compact structure on a finite `X`: `η: 1 → X × X` and
    /// `ε: X × X → 1`, both 1 exactly on the diagonal.
    pub fn compact_unit_counit(semiring: Semiring, x: Carrier) -> Result<(Rel, Rel)> {
        let xs = x.require_elements()?;
        let xx = Carrier::pair(x.clone(), x);
        let diag = xs
            .iter()
            .map(|e| (Elem::pair(e.clone(), e.clone()), semiring.one()));
        let row = FinMultiset::from_pairs(semiring, diag)?;
        let eta = Rel::explicit_from_rows(semiring, Carrier::Unit, xx, BTreeMap::from([(Elem::Star, row)]));
        let eps = eta.transpose();
        Ok((eta, eps))
    }
}
