//! Random generators for values, relations and instances. Small magnitudes
//! keep exact arithmetic cheap.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::carrier::{Carrier, Elem, Monomial};
use crate::formaldist::TameFormalDist;
use crate::instances::PartialInjection;
use crate::multiset::FinMultiset;
use crate::rel::Rel;
use crate::semiring::{QISqrt2, QSqrt2, Semiring, Value};

fn small_rat<R: Rng + ?Sized>(rng: &mut R) -> BigRational {
    BigRational::new(BigInt::from(rng.random_range(-5..=5)), BigInt::from(rng.random_range(1..=4)))
}

/// A random value, possibly zero.
pub fn value<R: Rng + ?Sized>(rng: &mut R, semiring: Semiring) -> Value {
    match semiring {
        Semiring::Bool2 => Value::Bool(rng.random_bool(0.5)),
        Semiring::Nat => Value::Nat(BigUint::from(rng.random_range(0u32..=5))),
        Semiring::Int => Value::int(rng.random_range(-5..=5)),
        Semiring::Rat => Value::Rat(small_rat(rng)),
        Semiring::F64 => Value::F64(rng.random_range(-1.0..1.0)),
        Semiring::C64 => Value::C64(Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))),
        Semiring::QSqrt2 => Value::QSqrt2(QSqrt2::new(small_rat(rng), small_rat(rng))),
        Semiring::QISqrt2 => Value::QISqrt2(QISqrt2::new(
            QSqrt2::new(small_rat(rng), small_rat(rng)),
            QSqrt2::new(small_rat(rng), small_rat(rng)),
        )),
    }
}

pub fn nonzero_value<R: Rng + ?Sized>(rng: &mut R, semiring: Semiring) -> Value {
    loop {
        let v = value(rng, semiring);
        if !v.is_zero() {
            return v;
        }
    }
}

/// A finite carrier `prefix0, …` with between `min` and `max` elements.
pub fn carrier<R: Rng + ?Sized>(rng: &mut R, prefix: &str, min: usize, max: usize) -> Carrier {
    Carrier::numbered(prefix, rng.random_range(min..=max))
}

/// A random multiset on a finite carrier; each element is in the support
/// with probability `density`.
pub fn multiset<R: Rng + ?Sized>(rng: &mut R, semiring: Semiring, c: &Carrier, density: f64) -> FinMultiset {
    let mut m = FinMultiset::new(semiring);
    for e in c.elements().expect("finite carrier") {
        if rng.random_bool(density) {
            m.insert_add(e, nonzero_value(rng, semiring));
        }
    }
    m
}

/// A random explicit relation between finite carriers.
pub fn relation<R: Rng + ?Sized>(rng: &mut R, semiring: Semiring, dom: &Carrier, cod: &Carrier, density: f64) -> Rel {
    let rows: BTreeMap<Elem, FinMultiset> = dom
        .elements()
        .expect("finite carrier")
        .into_iter()
        .map(|x| (x, multiset(rng, semiring, cod, density)))
        .filter(|(_, m)| !m.is_empty())
        .collect();
    Rel::from_rows(semiring, dom.clone(), cod.clone(), rows).expect("well-formed random relation")
}

/// A random `n × n` unitary over `c64`: a permutation composed with a
/// 2×2 rotation (with phases) embedded at two random coordinates.
pub fn unitary_c64<R: Rng + ?Sized>(rng: &mut R, x: &Carrier) -> Rel {
    let xs = x.elements().expect("finite carrier");
    let n = xs.len();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let c = |z: Complex64| Value::C64(z);
    let mut m = vec![vec![c(Complex64::new(0.0, 0.0)); n]; n];
    for (i, &j) in perm.iter().enumerate() {
        m[i][j] = c(Complex64::new(1.0, 0.0));
    }
    let p = Rel::from_matrix(Semiring::C64, x.clone(), x.clone(), m).expect("square matrix");
    if n < 2 {
        return p;
    }
    let i = rng.random_range(0..n);
    let j = (i + rng.random_range(1..n)) % n;
    let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let (al, be): (f64, f64) = (rng.random_range(0.0..6.3), rng.random_range(0.0..6.3));
    let (ea, eb) = (Complex64::from_polar(1.0, al), Complex64::from_polar(1.0, be));
    let (co, si) = (theta.cos(), theta.sin());
    let mut g = vec![vec![c(Complex64::new(0.0, 0.0)); n]; n];
    for (k, row) in g.iter_mut().enumerate() {
        if k != i && k != j {
            row[k] = c(Complex64::new(1.0, 0.0));
        }
    }
    g[i][i] = c(ea * co);
    g[i][j] = c(-eb * si);
    g[j][i] = c(ea * si);
    g[j][j] = c(eb * co);
    let g = Rel::from_matrix(Semiring::C64, x.clone(), x.clone(), g).expect("square matrix");
    crate::rel::compose(&p, &g).expect("composable").chop(1e-15)
}

/// A random partial injection between finite carriers; each domain element
/// is matched with probability `density` while codomain elements remain.
pub fn partial_injection<R: Rng + ?Sized>(rng: &mut R, dom: &Carrier, cod: &Carrier, density: f64) -> PartialInjection {
    let xs = dom.elements().expect("finite carrier");
    let mut ys = cod.elements().expect("finite carrier");
    ys.shuffle(rng);
    let pairs: Vec<(Elem, Elem)> = xs
        .into_iter()
        .filter(|_| rng.random_bool(density))
        .zip(ys)
        .collect();
    PartialInjection::new(dom.clone(), cod.clone(), pairs).expect("injective by construction")
}

/// A random monomial in the given variables of degree at most `max_degree`.
pub fn monomial<R: Rng + ?Sized>(rng: &mut R, vars: &[Elem], max_degree: u32) -> Monomial {
    let d = rng.random_range(0..=max_degree);
    Monomial::from_exponents((0..d).map(|_| (vars[rng.random_range(0..vars.len())].clone(), 1)))
}

/// A finite-support distribution with up to `terms` random coefficients
/// on monomials of degree at most `max_degree` on each side.
pub fn formal_distribution<R: Rng + ?Sized>(
    rng: &mut R,
    semiring: Semiring,
    x: &Carrier,
    y: &Carrier,
    max_degree: u32,
    terms: usize,
) -> TameFormalDist {
    let (xv, yv) = (x.elements().expect("finite"), y.elements().expect("finite"));
    let mut coeffs: BTreeMap<Monomial, Value> = BTreeMap::new();
    for _ in 0..terms {
        let chi = Monomial::star(&monomial(rng, &xv, max_degree), &monomial(rng, &yv, max_degree));
        coeffs.insert(chi, nonzero_value(rng, semiring));
    }
    TameFormalDist::from_coefficients(semiring, x.clone(), y.clone(), coeffs).expect("valid coefficients")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_are_well_formed() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for s in Semiring::ALL {
            let a = carrier(&mut rng, "a", 0, 4);
            let b = carrier(&mut rng, "b", 0, 4);
            let r = relation(&mut rng, s, &a, &b, 0.5);
            assert!(r.check_coherent(&[], 0.0).is_coherent());
        }
        for n in 1..6 {
            let x = Carrier::numbered("e", n);
            let u = unitary_c64(&mut rng, &x);
            assert!(u.is_unitary(1e-12).unwrap());
        }
        let a = Carrier::numbered("a", 5);
        let f = partial_injection(&mut rng, &a, &a, 0.7);
        assert!(f.is_mutually_inverse());
    }
}
