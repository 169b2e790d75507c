//! Tame formal distributions as multirelations between monomial carriers.
//!
//! A distribution `p ∈ S[[X+Y]]` is tame when each `p̂(q)` is a finite
//! polynomial; such a `p` is the same thing as a bifinite multirelation
//! `M_ℕ(X) → M_ℕ(Y)` whose entry at `(φ, ψ)` is the coefficient `p(φ⋆ψ)`.
//! Here the involution is the identity throughout.

use std::collections::{BTreeMap, BTreeSet};

use crate::carrier::{Carrier, Elem, Monomial};
use crate::error::{Error, Result};
use crate::multiset::FinMultiset;
use crate::rel::Rel;
use crate::semiring::{Semiring, Value};

/// `φ ⋆ ψ` over `X + Y`.
pub fn star(phi: &Monomial, psi: &Monomial) -> Monomial {
    Monomial::star(phi, psi)
}

/// Restriction of a monomial over `X + Y` to each summand.
pub fn split(chi: &Monomial) -> Option<(Monomial, Monomial)> {
    chi.split()
}

fn mono(e: &Elem) -> Result<&Monomial> {
    match e {
        Elem::Mono(m) => Ok(m),
        other => Err(Error::InvalidArgument(format!("{other} is not a monomial"))),
    }
}

/// A bifinite multirelation `monomials(X) → monomials(Y)`.
#[derive(Clone, Debug)]
pub struct TameFormalDist {
    rel: Rel,
}

impl TameFormalDist {
    pub fn new(rel: Rel) -> Result<Self> {
        match (rel.dom(), rel.cod()) {
            (Carrier::Monomials(_), Carrier::Monomials(_)) => Ok(TameFormalDist { rel }),
            _ => Err(Error::CarrierMismatch(format!(
                "{} → {} is not between monomial carriers",
                rel.dom(),
                rel.cod()
            ))),
        }
    }

    /// Builds a finite-support distribution from its coefficients `p(χ)`,
    /// `χ` a monomial over `X + Y`.
    pub fn from_coefficients(
        semiring: Semiring,
        x: Carrier,
        y: Carrier,
        coeffs: impl IntoIterator<Item = (Monomial, Value)>,
    ) -> Result<Self> {
        let mut entries = Vec::new();
        for (chi, v) in coeffs {
            let (phi, psi) = split(&chi)
                .ok_or_else(|| Error::InvalidArgument(format!("{chi} is not a monomial over a sum")))?;
            if !v.is_zero() {
                entries.push((Elem::Mono(phi), Elem::Mono(psi), v));
            }
        }
        let rel = Rel::from_entries(semiring, Carrier::monomials(x), Carrier::monomials(y), entries)?;
        Ok(TameFormalDist { rel })
    }

    pub fn rel(&self) -> &Rel {
        &self.rel
    }

    pub fn into_rel(self) -> Rel {
        self.rel
    }

    pub fn semiring(&self) -> Semiring {
        self.rel.semiring()
    }

    /// `p(φ ⋆ ψ)`.
    pub fn at(&self, phi: &Monomial, psi: &Monomial) -> Value {
        self.rel.entry(&Elem::Mono(phi.clone()), &Elem::Mono(psi.clone()))
    }

    /// The coefficient `p(χ)` of a monomial over `X + Y`.
    pub fn coefficient(&self, chi: &Monomial) -> Result<Value> {
        let (phi, psi) = split(chi)
            .ok_or_else(|| Error::InvalidArgument(format!("{chi} is not a monomial over a sum")))?;
        Ok(self.at(&phi, &psi))
    }

    /// Support monomials `ψ` of the row at `φ`.
    fn row_support(&self, phi: &Monomial) -> Vec<Monomial> {
        mono_support(&self.rel.row(&Elem::Mono(phi.clone())))
    }

    fn col_support(&self, psi: &Monomial) -> Vec<Monomial> {
        mono_support(&self.rel.col(&Elem::Mono(psi.clone())))
    }
}

fn mono_support(m: &FinMultiset) -> Vec<Monomial> {
    m.support()
        .filter_map(|e| mono(e).ok().cloned())
        .collect()
}

/// The comparison distribution: coefficient 1 at `χ` iff `χ(κ₁−) = χ(κ₂−)`.
/// Its support is infinite, so it is lazy.
pub fn fdist_identity(semiring: Semiring, vars: Carrier) -> TameFormalDist {
    let m = Carrier::monomials(vars);
    TameFormalDist {
        rel: Rel::lazy(
            semiring,
            m.clone(),
            m,
            move |e| FinMultiset::unit(semiring, e.clone()),
            move |e| FinMultiset::unit(semiring, e.clone()),
        ),
    }
}

/// `(p • q)(φ ⋆ θ) = Σ_ψ p(φ⋆ψ)·q(ψ⋆θ)`, evaluated coefficient by
/// coefficient. The sum ranges over the (finite) row of `p` at `φ`, or
/// equivalently the column of `q` at `θ`.
pub fn fdist_compose_formula(p: &TameFormalDist, q: &TameFormalDist) -> Result<TameFormalDist> {
    if p.semiring() != q.semiring() {
        return Err(Error::MixedSemiring(p.semiring(), q.semiring()));
    }
    if p.rel.cod() != q.rel.dom() {
        return Err(Error::CarrierMismatch(format!(
            "cannot compose {} → {} with {} → {}",
            p.rel.dom(),
            p.rel.cod(),
            q.rel.dom(),
            q.rel.cod()
        )));
    }
    let semiring = p.semiring();
    let row_of = {
        let (p, q) = (p.clone(), q.clone());
        move |phi: &Monomial| -> FinMultiset {
            let psis = p.row_support(phi);
            let thetas: BTreeSet<Monomial> = psis.iter().flat_map(|psi| q.row_support(psi)).collect();
            let mut out = FinMultiset::new(semiring);
            for theta in thetas {
                let mut acc = semiring.zero();
                for psi in &psis {
                    acc = acc.add(&p.at(phi, psi).mul(&q.at(psi, &theta)));
                }
                out.insert_add(Elem::Mono(theta), acc);
            }
            out
        }
    };
    let col_of = {
        let (p, q) = (p.clone(), q.clone());
        move |theta: &Monomial| -> FinMultiset {
            let psis = q.col_support(theta);
            let phis: BTreeSet<Monomial> = psis.iter().flat_map(|psi| p.col_support(psi)).collect();
            let mut out = FinMultiset::new(semiring);
            for phi in phis {
                let mut acc = semiring.zero();
                for psi in &psis {
                    acc = acc.add(&p.at(&phi, psi).mul(&q.at(psi, theta)));
                }
                out.insert_add(Elem::Mono(phi), acc);
            }
            out
        }
    };
    let (dom, cod) = (p.rel.dom().clone(), q.rel.cod().clone());
    let rel = if let Some(rows) = p.rel.explicit_rows() {
        let out: BTreeMap<Elem, FinMultiset> = rows
            .keys()
            .map(|x| Ok((x.clone(), row_of(mono(x)?))))
            .collect::<Result<_>>()?;
        Rel::from_rows(semiring, dom, cod, out)?
    } else if let Some(cols) = q.rel.explicit_cols() {
        let out: BTreeMap<Elem, FinMultiset> = cols
            .keys()
            .map(|z| Ok((z.clone(), col_of(mono(z)?))))
            .collect::<Result<_>>()?;
        Rel::from_cols(semiring, dom, cod, out)?
    } else {
        Rel::lazy(
            semiring,
            dom,
            cod,
            move |e| mono(e).map(&row_of).unwrap_or_else(|_| FinMultiset::new(semiring)),
            move |e| mono(e).map(&col_of).unwrap_or_else(|_| FinMultiset::new(semiring)),
        )
    };
    Ok(TameFormalDist { rel })
}

/// `p†(χ) = p(χ(κ₂−) ⋆ χ(κ₁−))`: the summands trade places, with no
/// conjugation.
pub fn fdist_dagger_formula(p: &TameFormalDist) -> TameFormalDist {
    let semiring = p.semiring();
    let (dom, cod) = (p.rel.cod().clone(), p.rel.dom().clone());
    let swapped = |p: &TameFormalDist, psi: &Monomial| -> FinMultiset {
        let mut out = FinMultiset::new(semiring);
        for phi in p.col_support(psi) {
            let v = p.at(&phi, psi);
            out.insert_add(Elem::Mono(phi), v);
        }
        out
    };
    let rel = if let Some(cols) = p.rel.explicit_cols() {
        let rows = cols
            .keys()
            .filter_map(|y| mono(y).ok().map(|psi| (y.clone(), swapped(p, psi))))
            .collect();
        Rel::from_rows(semiring, dom, cod, rows).expect("transposed table stays within the carriers")
    } else {
        let (p1, p2) = (p.clone(), p.clone());
        Rel::lazy(
            semiring,
            dom,
            cod,
            move |e| {
                mono(e)
                    .map(|psi| {
                        let mut out = FinMultiset::new(semiring);
                        for phi in p1.col_support(psi) {
                            out.insert_add(Elem::Mono(phi.clone()), p1.at(&phi, psi));
                        }
                        out
                    })
                    .unwrap_or_else(|_| FinMultiset::new(semiring))
            },
            move |e| {
                mono(e)
                    .map(|phi| {
                        let mut out = FinMultiset::new(semiring);
                        for psi in p2.row_support(phi) {
                            out.insert_add(Elem::Mono(psi.clone()), p2.at(phi, &psi));
                        }
                        out
                    })
                    .unwrap_or_else(|_| FinMultiset::new(semiring))
            },
        )
    };
    TameFormalDist { rel }
}

/// `p̂(q) = λφ. Σ_ψ q(ψ)·p(φ⋆ψ)`: a finite polynomial over `X` because
/// every column of `p` is finite.
pub fn phat_apply(p: &TameFormalDist, q: &FinMultiset) -> Result<FinMultiset> {
    if q.semiring() != p.semiring() {
        return Err(Error::MixedSemiring(p.semiring(), q.semiring()));
    }
    let mut out = FinMultiset::new(p.semiring());
    for (psi, c) in q.iter() {
        p.rel.cod().check_contains(psi)?;
        out.axpy(c, &p.rel.col(psi));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rel::compose;

    fn vars(names: &[&str]) -> Carrier {
        Carrier::finite(names.iter().copied()).unwrap()
    }

    fn m(c: &Carrier, pairs: &[(&str, u32)]) -> Monomial {
        Monomial::from_exponents(pairs.iter().map(|(v, n)| (c.at(v), *n)))
    }

    #[test]
    fn star_split_examples() {
        let (x, y) = (vars(&["x"]), vars(&["y"]));
        let chi = star(&m(&x, &[("x", 2)]), &m(&y, &[("y", 1)]));
        assert_eq!(chi.exponent(&Elem::left(x.at("x"))), 2);
        assert_eq!(chi.exponent(&Elem::right(y.at("y"))), 1);
        assert!(star(&Monomial::one(), &Monomial::one()).is_one());
        let chi = Monomial::from_exponents([(Elem::left(x.at("x")), 1), (Elem::right(y.at("y")), 3)]);
        assert_eq!(split(&chi).unwrap(), (m(&x, &[("x", 1)]), m(&y, &[("y", 3)])));
    }

    fn single(sr: Semiring, a: &Carrier, phi: Monomial, b: &Carrier, psi: Monomial, v: i64) -> TameFormalDist {
        TameFormalDist::from_coefficients(sr, a.clone(), b.clone(), [(star(&phi, &psi), Value::rat(v, 1))]).unwrap()
    }

    #[test]
    fn one_term_composite() {
        let (x, y, z) = (vars(&["x"]), vars(&["y"]), vars(&["z"]));
        let p = single(Semiring::Rat, &x, m(&x, &[("x", 1)]), &y, m(&y, &[("y", 2)]), 2);
        let q = single(Semiring::Rat, &y, m(&y, &[("y", 2)]), &z, m(&z, &[("z", 1)]), 3);
        let pq = fdist_compose_formula(&p, &q).unwrap();
        assert_eq!(pq.at(&m(&x, &[("x", 1)]), &m(&z, &[("z", 1)])), Value::rat(6, 1));
        assert_eq!(pq.rel().support_size(), Some(1));
        assert!(pq.rel().approx_eq(&compose(p.rel(), q.rel()).unwrap(), 0.0).unwrap());
    }

    #[test]
    fn identity_laws() {
        let (x, y) = (vars(&["x", "w"]), vars(&["y"]));
        let p = TameFormalDist::from_coefficients(
            Semiring::Rat,
            x.clone(),
            y.clone(),
            [
                (star(&m(&x, &[("x", 1)]), &m(&y, &[("y", 2)])), Value::rat(2, 1)),
                (star(&m(&x, &[("w", 2)]), &Monomial::one()), Value::rat(-1, 3)),
            ],
        )
        .unwrap();
        let idx = fdist_identity(Semiring::Rat, x.clone());
        let idy = fdist_identity(Semiring::Rat, y.clone());
        let left = fdist_compose_formula(&idx, &p).unwrap();
        let right = fdist_compose_formula(&p, &idy).unwrap();
        for phi in Monomial::enumerate(&x.elements().unwrap(), 3) {
            for psi in Monomial::enumerate(&y.elements().unwrap(), 3) {
                assert_eq!(left.at(&phi, &psi), p.at(&phi, &psi));
                assert_eq!(right.at(&phi, &psi), p.at(&phi, &psi));
            }
        }
        assert_eq!(idx.at(&m(&x, &[("x", 2)]), &m(&x, &[("x", 2)])), Value::rat(1, 1));
        assert!(idx.at(&m(&x, &[("x", 2)]), &m(&x, &[("x", 3)])).is_zero());
    }

    #[test]
    fn dagger_formula() {
        let (x, y) = (vars(&["x"]), vars(&["y"]));
        let p = single(Semiring::Rat, &x, m(&x, &[("x", 1)]), &y, m(&y, &[("y", 2)]), 2);
        let d = fdist_dagger_formula(&p);
        assert_eq!(d.at(&m(&y, &[("y", 2)]), &m(&x, &[("x", 1)])), Value::rat(2, 1));
        assert!(d.rel().approx_eq(&p.rel().dagger(), 0.0).unwrap());
        assert!(fdist_dagger_formula(&d).rel().approx_eq(p.rel(), 0.0).unwrap());
        let id = fdist_identity(Semiring::Rat, x.clone());
        let idd = fdist_dagger_formula(&id);
        for phi in Monomial::enumerate(&x.elements().unwrap(), 4) {
            let e = Elem::Mono(phi);
            assert_eq!(idd.rel().row(&e).as_ref(), id.rel().row(&e).as_ref());
        }
    }

    #[test]
    fn phat() {
        let (x, y) = (vars(&["x"]), vars(&["y"]));
        let p = single(Semiring::Rat, &x, m(&x, &[("x", 1)]), &y, m(&y, &[("y", 2)]), 2);
        let psi = Elem::Mono(m(&y, &[("y", 2)]));
        let q = FinMultiset::unit(Semiring::Rat, psi.clone());
        assert_eq!(phat_apply(&p, &q).unwrap(), p.rel().col(&psi).into_owned());
        let id = fdist_identity(Semiring::Rat, y.clone());
        let poly = FinMultiset::from_pairs(
            Semiring::Rat,
            [(psi, Value::rat(3, 1)), (Elem::Mono(Monomial::one()), Value::rat(-1, 2))],
        )
        .unwrap();
        assert_eq!(phat_apply(&id, &poly).unwrap(), poly);
    }

    #[test]
    fn rejects_non_monomial_carriers() {
        let r = Rel::identity(Semiring::Rat, vars(&["a"]));
        assert!(TameFormalDist::new(r).is_err());
    }
}
