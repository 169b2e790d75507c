//! Involutive commutative semirings.
//!
//! Every value carries its semiring tag at runtime so that relations loaded
//! from files can pick their scalars dynamically. Arithmetic between values of
//! different semirings is a programming error: containers check tags once at
//! their boundary and the scalar operations below assume agreement.
//!
//! The two quadratic fields `qsqrt2` (ℚ(√2)) and `qisqrt2` (ℚ(i, √2)) exist so
//! that amplitudes such as ±1/√2 and their squared norms are computed exactly.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Semiring {
    Bool2,
    Nat,
    Int,
    Rat,
    F64,
    C64,
    QSqrt2,
    QISqrt2,
}

impl Semiring {
    pub const ALL: [Semiring; 8] = [
        Semiring::Bool2,
        Semiring::Nat,
        Semiring::Int,
        Semiring::Rat,
        Semiring::F64,
        Semiring::C64,
        Semiring::QSqrt2,
        Semiring::QISqrt2,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Semiring::Bool2 => "bool2",
            Semiring::Nat => "nat",
            Semiring::Int => "int",
            Semiring::Rat => "rat",
            Semiring::F64 => "f64",
            Semiring::C64 => "c64",
            Semiring::QSqrt2 => "qsqrt2",
            Semiring::QISqrt2 => "qisqrt2",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Semiring> {
        Semiring::ALL.into_iter().find(|s| s.tag() == tag)
    }

    /// Additive inverses exist (the semiring is a ring).
    pub fn has_negation(self) -> bool {
        !matches!(self, Semiring::Bool2 | Semiring::Nat)
    }

    /// Nonzero elements are invertible (the semiring is a field).
    pub fn has_division(self) -> bool {
        matches!(
            self,
            Semiring::Rat | Semiring::F64 | Semiring::C64 | Semiring::QSqrt2 | Semiring::QISqrt2
        )
    }

    pub fn has_exact_eq(self) -> bool {
        !self.is_float()
    }

    pub fn has_norm_sq(self) -> bool {
        true
    }

    /// Square roots of nonnegative reals are always available (floats) or
    /// available whenever they are representable (the exact fields).
    pub fn has_sqrt_nonneg(self) -> bool {
        matches!(
            self,
            Semiring::F64 | Semiring::C64 | Semiring::Rat | Semiring::QSqrt2 | Semiring::QISqrt2
        )
    }

    pub fn is_float(self) -> bool {
        matches!(self, Semiring::F64 | Semiring::C64)
    }

    /// Conjugation is the identity map.
    pub fn has_trivial_involution(self) -> bool {
        !matches!(self, Semiring::C64 | Semiring::QISqrt2)
    }

    pub fn zero(self) -> Value {
        match self {
            Semiring::Bool2 => Value::Bool(false),
            Semiring::Nat => Value::Nat(BigUint::zero()),
            Semiring::Int => Value::Int(BigInt::zero()),
            Semiring::Rat => Value::Rat(BigRational::zero()),
            Semiring::F64 => Value::F64(0.0),
            Semiring::C64 => Value::C64(Complex64::new(0.0, 0.0)),
            Semiring::QSqrt2 => Value::QSqrt2(QSqrt2::zero()),
            Semiring::QISqrt2 => Value::QISqrt2(QISqrt2::zero()),
        }
    }

    pub fn one(self) -> Value {
        match self {
            Semiring::Bool2 => Value::Bool(true),
            Semiring::Nat => Value::Nat(BigUint::one()),
            Semiring::Int => Value::Int(BigInt::one()),
            Semiring::Rat => Value::Rat(BigRational::one()),
            Semiring::F64 => Value::F64(1.0),
            Semiring::C64 => Value::C64(Complex64::new(1.0, 0.0)),
            Semiring::QSqrt2 => Value::QSqrt2(QSqrt2::one()),
            Semiring::QISqrt2 => Value::QISqrt2(QISqrt2::one()),
        }
    }

    /// The image of an integer under the unique semiring map from ℕ (or ℤ).
    pub fn from_i64(self, n: i64) -> Result<Value> {
        if n < 0 && !self.has_negation() {
            return Err(Error::Negative);
        }
        Ok(match self {
            Semiring::Bool2 => Value::Bool(n != 0),
            Semiring::Nat => Value::Nat(BigUint::from(n as u64)),
            Semiring::Int => Value::Int(BigInt::from(n)),
            Semiring::Rat => Value::Rat(BigRational::from_integer(n.into())),
            Semiring::F64 => Value::F64(n as f64),
            Semiring::C64 => Value::C64(Complex64::new(n as f64, 0.0)),
            Semiring::QSqrt2 => Value::QSqrt2(QSqrt2::rational(BigRational::from_integer(n.into()))),
            Semiring::QISqrt2 => Value::QISqrt2(QISqrt2::real(QSqrt2::rational(
                BigRational::from_integer(n.into()),
            ))),
        })
    }

    /// Embeds a rational into a field (or an integer into a ring).
    pub fn from_rational(self, q: &BigRational) -> Result<Value> {
        Ok(match self {
            Semiring::Rat => Value::Rat(q.clone()),
            Semiring::F64 => Value::F64(rat_to_f64(q)),
            Semiring::C64 => Value::C64(Complex64::new(rat_to_f64(q), 0.0)),
            Semiring::QSqrt2 => Value::QSqrt2(QSqrt2::rational(q.clone())),
            Semiring::QISqrt2 => Value::QISqrt2(QISqrt2::real(QSqrt2::rational(q.clone()))),
            Semiring::Int if q.is_integer() => Value::Int(q.to_integer()),
            Semiring::Nat if q.is_integer() && !q.is_negative() => {
                Value::Nat(q.to_integer().to_biguint().expect("nonnegative"))
            }
            Semiring::Bool2 if q.is_zero() || q.is_one() => Value::Bool(q.is_one()),
            _ => return Err(Error::DivisionUnavailable(self)),
        })
    }
}

impl fmt::Display for Semiring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

pub(crate) fn rat_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Exact square root of a nonnegative rational, if it is itself rational.
pub(crate) fn sqrt_rational(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// `a + b√2` with rational `a`, `b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QSqrt2 {
    a: BigRational,
    b: BigRational,
}

impl QSqrt2 {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        QSqrt2 { a, b }
    }

    pub fn rational(a: BigRational) -> Self {
        QSqrt2 {
            a,
            b: BigRational::zero(),
        }
    }

    pub fn zero() -> Self {
        Self::rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::rational(BigRational::one())
    }

    /// 1/√2 = (1/2)√2.
    pub fn inv_sqrt2() -> Self {
        QSqrt2::new(BigRational::zero(), rat(1, 2))
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        QSqrt2::new(&self.a + &o.a, &self.b + &o.b)
    }

    pub fn sub(&self, o: &Self) -> Self {
        QSqrt2::new(&self.a - &o.a, &self.b - &o.b)
    }

    pub fn neg(&self) -> Self {
        QSqrt2::new(-&self.a, -&self.b)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let two = BigRational::from_integer(2.into());
        QSqrt2::new(
            &self.a * &o.a + two * &self.b * &o.b,
            &self.a * &o.b + &self.b * &o.a,
        )
    }

    /// Field norm `a² − 2b²`.
    pub fn norm(&self) -> BigRational {
        let two = BigRational::from_integer(2.into());
        &self.a * &self.a - two * &self.b * &self.b
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some(QSqrt2::new(&self.a / &n, -&self.b / &n))
    }

    /// Sign of the real number `a + b√2`.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&BigRational::zero());
        let sb = self.b.cmp(&BigRational::zero());
        match (sa, sb) {
            (s, Ordering::Equal) => s,
            (Ordering::Equal, s) => s,
            (Ordering::Greater, Ordering::Greater) => Ordering::Greater,
            (Ordering::Less, Ordering::Less) => Ordering::Less,
            (sa, _) => {
                // Opposite signs; a² = 2b² has no nonzero rational solution.
                let two = BigRational::from_integer(2.into());
                let a2 = &self.a * &self.a;
                let b2 = two * &self.b * &self.b;
                if a2 > b2 {
                    sa
                } else {
                    sa.reverse()
                }
            }
        }
    }

    /// The nonnegative square root inside ℚ(√2), if one exists.
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        if self.signum() == Ordering::Less {
            return None;
        }
        // (x + y√2)² = a + b√2  ⇔  x² + 2y² = a, 2xy = b; and the norm
        // (x² − 2y²)² = a² − 2b² must be a rational square.
        let n = sqrt_rational(&self.norm())?;
        let two = BigRational::from_integer(2.into());
        let four = BigRational::from_integer(4.into());
        for m in [n.clone(), -n] {
            let x2 = (&self.a + &m) / &two;
            let y2 = (&self.a - &m) / &four;
            let (Some(x), Some(y)) = (sqrt_rational(&x2), sqrt_rational(&y2)) else {
                continue;
            };
            let y = if (&two * &x * &y) == self.b { y } else { -y };
            let mut t = QSqrt2::new(x, y);
            if t.signum() == Ordering::Less {
                t = t.neg();
            }
            if &t.mul(&t) == self {
                return Some(t);
            }
        }
        None
    }

    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.a) + rat_to_f64(&self.b) * std::f64::consts::SQRT_2
    }
}

/// `u + i·v` with `u, v ∈ ℚ(√2)`, i.e. `a + b√2 + c·i + d·i√2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QISqrt2 {
    re: QSqrt2,
    im: QSqrt2,
}

impl QISqrt2 {
    pub fn new(re: QSqrt2, im: QSqrt2) -> Self {
        QISqrt2 { re, im }
    }

    /// From the four rational coordinates of `a + b√2 + c·i + d·i√2`.
    pub fn from_parts(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Self {
        QISqrt2::new(QSqrt2::new(a, b), QSqrt2::new(c, d))
    }

    pub fn real(re: QSqrt2) -> Self {
        QISqrt2::new(re, QSqrt2::zero())
    }

    pub fn zero() -> Self {
        Self::real(QSqrt2::zero())
    }

    pub fn one() -> Self {
        Self::real(QSqrt2::one())
    }

    pub fn re(&self) -> &QSqrt2 {
        &self.re
    }

    pub fn im(&self) -> &QSqrt2 {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        QISqrt2::new(self.re.add(&o.re), self.im.add(&o.im))
    }

    pub fn neg(&self) -> Self {
        QISqrt2::new(self.re.neg(), self.im.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        QISqrt2::new(
            self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        )
    }

    pub fn conj(&self) -> Self {
        QISqrt2::new(self.re.clone(), self.im.neg())
    }

    pub fn inv(&self) -> Option<Self> {
        let modulus = self.re.mul(&self.re).add(&self.im.mul(&self.im));
        let m_inv = modulus.inv()?;
        let c = self.conj();
        Some(QISqrt2::new(c.re.mul(&m_inv), c.im.mul(&m_inv)))
    }
}

/// An element of one of the registered semirings.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Bool(bool),
    Nat(BigUint),
    Int(BigInt),
    Rat(BigRational),
    F64(f64),
    C64(Complex64),
    QSqrt2(QSqrt2),
    QISqrt2(QISqrt2),
}

fn mismatch(a: &Value, b: &Value) -> ! {
    panic!(
        "semiring mismatch in scalar arithmetic: {} vs {}",
        a.semiring(),
        b.semiring()
    )
}

impl Value {
    pub fn semiring(&self) -> Semiring {
        match self {
            Value::Bool(_) => Semiring::Bool2,
            Value::Nat(_) => Semiring::Nat,
            Value::Int(_) => Semiring::Int,
            Value::Rat(_) => Semiring::Rat,
            Value::F64(_) => Semiring::F64,
            Value::C64(_) => Semiring::C64,
            Value::QSqrt2(_) => Semiring::QSqrt2,
            Value::QISqrt2(_) => Semiring::QISqrt2,
        }
    }

    pub fn rat(n: i64, d: i64) -> Value {
        Value::Rat(rat(n, d))
    }

    pub fn int(n: i64) -> Value {
        Value::Int(n.into())
    }

    pub fn c64(re: f64, im: f64) -> Value {
        Value::C64(Complex64::new(re, im))
    }

    /// `a + b√2` from small rationals given as `(numerator, denominator)`.
    pub fn qsqrt2(a: (i64, i64), b: (i64, i64)) -> Value {
        Value::QSqrt2(QSqrt2::new(rat(a.0, a.1), rat(b.0, b.1)))
    }

    /// `a + b√2 + c·i + d·i√2` from small rationals.
    pub fn qisqrt2(a: (i64, i64), b: (i64, i64), c: (i64, i64), d: (i64, i64)) -> Value {
        Value::QISqrt2(QISqrt2::from_parts(
            rat(a.0, a.1),
            rat(b.0, b.1),
            rat(c.0, c.1),
            rat(d.0, d.1),
        ))
    }

    /// Exact test against zero (floats compare with `== 0.0`).
    pub fn is_zero(&self) -> bool {
        match self {
            Value::Bool(b) => !b,
            Value::Nat(n) => n.is_zero(),
            Value::Int(n) => n.is_zero(),
            Value::Rat(q) => q.is_zero(),
            Value::F64(x) => *x == 0.0,
            Value::C64(z) => z.re == 0.0 && z.im == 0.0,
            Value::QSqrt2(v) => v.is_zero(),
            Value::QISqrt2(v) => v.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        *self == self.semiring().one()
    }

    pub fn add(&self, o: &Value) -> Value {
        match (self, o) {
            (Value::Bool(a), Value::Bool(b)) => Value::Bool(*a || *b),
            (Value::Nat(a), Value::Nat(b)) => Value::Nat(a + b),
            (Value::Int(a), Value::Int(b)) => Value::Int(a + b),
            (Value::Rat(a), Value::Rat(b)) => Value::Rat(a + b),
            (Value::F64(a), Value::F64(b)) => Value::F64(a + b),
            (Value::C64(a), Value::C64(b)) => Value::C64(a + b),
            (Value::QSqrt2(a), Value::QSqrt2(b)) => Value::QSqrt2(a.add(b)),
            (Value::QISqrt2(a), Value::QISqrt2(b)) => Value::QISqrt2(a.add(b)),
            _ => mismatch(self, o),
        }
    }

    pub fn mul(&self, o: &Value) -> Value {
        match (self, o) {
            (Value::Bool(a), Value::Bool(b)) => Value::Bool(*a && *b),
            (Value::Nat(a), Value::Nat(b)) => Value::Nat(a * b),
            (Value::Int(a), Value::Int(b)) => Value::Int(a * b),
            (Value::Rat(a), Value::Rat(b)) => Value::Rat(a * b),
            (Value::F64(a), Value::F64(b)) => Value::F64(a * b),
            (Value::C64(a), Value::C64(b)) => Value::C64(a * b),
            (Value::QSqrt2(a), Value::QSqrt2(b)) => Value::QSqrt2(a.mul(b)),
            (Value::QISqrt2(a), Value::QISqrt2(b)) => Value::QISqrt2(a.mul(b)),
            _ => mismatch(self, o),
        }
    }

    pub fn neg(&self) -> Result<Value> {
        Ok(match self {
            Value::Int(a) => Value::Int(-a),
            Value::Rat(a) => Value::Rat(-a),
            Value::F64(a) => Value::F64(-a),
            Value::C64(a) => Value::C64(-a),
            Value::QSqrt2(a) => Value::QSqrt2(a.neg()),
            Value::QISqrt2(a) => Value::QISqrt2(a.neg()),
            Value::Nat(n) if n.is_zero() => self.clone(),
            Value::Bool(false) => self.clone(),
            _ => return Err(Error::NegationUnavailable(self.semiring())),
        })
    }

    pub fn sub(&self, o: &Value) -> Result<Value> {
        Ok(self.add(&o.neg()?))
    }

    pub fn inv(&self) -> Result<Value> {
        if !self.semiring().has_division() {
            return Err(Error::DivisionUnavailable(self.semiring()));
        }
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            Value::Rat(a) => Value::Rat(a.recip()),
            Value::F64(a) => Value::F64(1.0 / a),
            Value::C64(a) => Value::C64(a.inv()),
            Value::QSqrt2(a) => Value::QSqrt2(a.inv().ok_or(Error::DivisionByZero)?),
            Value::QISqrt2(a) => Value::QISqrt2(a.inv().ok_or(Error::DivisionByZero)?),
            _ => unreachable!("checked has_division"),
        })
    }

    pub fn div(&self, o: &Value) -> Result<Value> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn conj(&self) -> Value {
        match self {
            Value::C64(z) => Value::C64(z.conj()),
            Value::QISqrt2(z) => Value::QISqrt2(z.conj()),
            _ => self.clone(),
        }
    }

    /// `s · conj(s)`, in the same semiring.
    pub fn norm_sq(&self) -> Value {
        self.mul(&self.conj())
    }

    /// Reads a nonnegative real-rational (or float) value as a probability.
    pub fn to_unit_interval(&self) -> Result<Prob> {
        let q = match self {
            Value::Bool(b) => BigRational::from_integer(BigInt::from(*b as u8)),
            Value::Nat(n) => BigRational::from_integer(BigInt::from_biguint(Sign::Plus, n.clone())),
            Value::Int(n) => BigRational::from_integer(n.clone()),
            Value::Rat(q) => q.clone(),
            Value::QSqrt2(v) => {
                if !v.b.is_zero() {
                    return Err(Error::IrrationalResidue);
                }
                v.a.clone()
            }
            Value::QISqrt2(v) => {
                if !v.re.b.is_zero() || !v.im.is_zero() {
                    return Err(Error::IrrationalResidue);
                }
                v.re.a.clone()
            }
            Value::F64(x) => {
                if *x < 0.0 {
                    return Err(Error::Negative);
                }
                return Ok(Prob::Float(*x));
            }
            Value::C64(z) => {
                if z.im.abs() > 1e-12 * (1.0 + z.re.abs()) {
                    return Err(Error::IrrationalResidue);
                }
                if z.re < 0.0 {
                    return Err(Error::Negative);
                }
                return Ok(Prob::Float(z.re));
            }
        };
        if q.is_negative() {
            return Err(Error::Negative);
        }
        Ok(Prob::Exact(q))
    }

    /// A nonnegative real square root, when one exists in the semiring.
    pub fn sqrt_nonneg(&self) -> Result<Value> {
        let fail = || Error::NotRepresentable(self.to_string());
        match self {
            Value::Bool(_) => Ok(self.clone()),
            Value::Nat(n) => {
                let r = n.sqrt();
                if &(&r * &r) == n {
                    Ok(Value::Nat(r))
                } else {
                    Err(fail())
                }
            }
            Value::Int(n) => {
                if n.is_negative() {
                    return Err(fail());
                }
                let r = n.sqrt();
                if &(&r * &r) == n {
                    Ok(Value::Int(r))
                } else {
                    Err(fail())
                }
            }
            Value::Rat(q) => sqrt_rational(q).map(Value::Rat).ok_or_else(fail),
            Value::F64(x) if *x >= 0.0 => Ok(Value::F64(x.sqrt())),
            Value::C64(z) if z.im == 0.0 && z.re >= 0.0 => Ok(Value::c64(z.re.sqrt(), 0.0)),
            Value::QSqrt2(v) => v.sqrt().map(Value::QSqrt2).ok_or_else(fail),
            Value::QISqrt2(v) if v.im.is_zero() => v
                .re
                .sqrt()
                .map(|r| Value::QISqrt2(QISqrt2::real(r)))
                .ok_or_else(fail),
            _ => Err(fail()),
        }
    }

    /// Approximate absolute value, used for pivot selection and tolerances.
    pub fn magnitude(&self) -> f64 {
        match self {
            Value::Bool(b) => *b as u8 as f64,
            Value::Nat(n) => n.to_f64().unwrap_or(f64::INFINITY),
            Value::Int(n) => n.abs().to_f64().unwrap_or(f64::INFINITY),
            Value::Rat(q) => rat_to_f64(q).abs(),
            Value::F64(x) => x.abs(),
            Value::C64(z) => z.norm(),
            Value::QSqrt2(v) => v.to_f64().abs(),
            Value::QISqrt2(v) => v.re.to_f64().hypot(v.im.to_f64()),
        }
    }

    /// Equality; exact for exact semirings, within `tol` (absolute) for floats.
    pub fn approx_eq(&self, o: &Value, tol: f64) -> bool {
        match (self, o) {
            (Value::F64(a), Value::F64(b)) => (a - b).abs() <= tol,
            (Value::C64(a), Value::C64(b)) => (a - b).norm() <= tol,
            _ => self == o,
        }
    }

    /// Zero test that honours `tol` for floats.
    pub fn approx_zero(&self, tol: f64) -> bool {
        if self.semiring().is_float() {
            self.magnitude() <= tol
        } else {
            self.is_zero()
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Nat(n) => write!(f, "{n}"),
            Value::Int(n) => write!(f, "{n}"),
            Value::Rat(q) => write!(f, "{q}"),
            Value::F64(x) => write!(f, "{x}"),
            Value::C64(z) => write!(f, "({}, {})", z.re, z.im),
            Value::QSqrt2(v) => write!(f, "{} + {}√2", v.a, v.b),
            Value::QISqrt2(v) => write!(
                f,
                "{} + {}√2 + {}i + {}i√2",
                v.re.a, v.re.b, v.im.a, v.im.b
            ),
        }
    }
}

/// A probability: exact rational for exact semirings, binary64 otherwise.
#[derive(Clone, Debug, PartialEq)]
pub enum Prob {
    Exact(BigRational),
    Float(f64),
}

impl Prob {
    pub fn zero_like(&self) -> Prob {
        match self {
            Prob::Exact(_) => Prob::Exact(BigRational::zero()),
            Prob::Float(_) => Prob::Float(0.0),
        }
    }

    pub fn add(&self, o: &Prob) -> Prob {
        match (self, o) {
            (Prob::Exact(a), Prob::Exact(b)) => Prob::Exact(a + b),
            _ => Prob::Float(self.to_f64() + o.to_f64()),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Prob::Exact(q) => rat_to_f64(q),
            Prob::Float(x) => *x,
        }
    }

    /// Within `tol` of `target`; exact probabilities compare exactly.
    pub fn approx_eq_rational(&self, target: &BigRational, tol: f64) -> bool {
        match self {
            Prob::Exact(q) => q == target,
            Prob::Float(x) => (x - rat_to_f64(target)).abs() <= tol,
        }
    }

    pub fn is_one(&self, tol: f64) -> bool {
        self.approx_eq_rational(&BigRational::one(), tol)
    }

    pub fn to_value(&self) -> Value {
        match self {
            Prob::Exact(q) => Value::Rat(q.clone()),
            Prob::Float(x) => Value::F64(*x),
        }
    }
}

impl fmt::Display for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prob::Exact(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            Prob::Float(x) => f.write_str(&format_sig17(*x)),
        }
    }
}

/// Decimal rendering with 17 significant digits, enough to round-trip binary64.
pub fn format_sig17(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return format!("{:.16}", 0.0);
    }
    let sci = format!("{x:.16e}");
    let exp: i32 = sci
        .rsplit('e')
        .next()
        .and_then(|e| e.parse().ok())
        .unwrap_or(0);
    let decimals = (16 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}
