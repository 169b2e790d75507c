#![allow(dead_code)]

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tamerel::{Rel, Semiring, Value};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn tol(s: Semiring) -> f64 {
    if s.is_float() {
        1e-9
    } else {
        0.0
    }
}

pub fn exact_tags() -> Vec<Semiring> {
    Semiring::ALL.iter().copied().filter(|s| !s.is_float()).collect()
}

pub fn fields() -> Vec<Semiring> {
    vec![Semiring::Rat, Semiring::F64, Semiring::C64, Semiring::QSqrt2, Semiring::QISqrt2]
}

/// Dense matrix in canonical element order.
pub fn dense(r: &Rel) -> Vec<Vec<Value>> {
    let xs = r.dom().elements().unwrap();
    let ys = r.cod().elements().unwrap();
    xs.iter().map(|x| ys.iter().map(|y| r.entry(x, y)).collect()).collect()
}

pub fn to_c64(v: &Value) -> Complex64 {
    match v {
        Value::Bool(b) => Complex64::new(*b as u8 as f64, 0.0),
        Value::Nat(n) => Complex64::new(n.to_f64().unwrap(), 0.0),
        Value::Int(n) => Complex64::new(n.to_f64().unwrap(), 0.0),
        Value::Rat(q) => Complex64::new(q.to_f64().unwrap(), 0.0),
        Value::F64(x) => Complex64::new(*x, 0.0),
        Value::C64(z) => *z,
        Value::QSqrt2(q) => Complex64::new(q.to_f64(), 0.0),
        Value::QISqrt2(q) => Complex64::new(q.re().to_f64(), q.im().to_f64()),
    }
}

/// Numerical rank through singular values.
pub fn rank(r: &Rel) -> usize {
    let d = dense(r);
    let (rows, cols) = (d.len(), r.cod().size().unwrap());
    if rows == 0 || cols == 0 {
        return 0;
    }
    let m = nalgebra::DMatrix::<Complex64>::from_fn(rows, cols, |i, j| to_c64(&d[i][j]));
    let sv = m.svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|&&x| x > 1e-9 * top.max(1.0)).count()
}
