//! The Hadamard walk on `ℤ + ℤ`.
//!
//! The left summand carries walkers moving left, the right summand walkers
//! moving right. One step is the lazy relation
//!
//! ```text
//! q(κ₁n, κ₁(n−1)) = 1/√2     q(κ₁n, κ₂(n+1)) =  1/√2
//! q(κ₂n, κ₁(n−1)) = 1/√2     q(κ₂n, κ₂(n+1)) = −1/√2
//! ```
//!
//! Over `qisqrt2` all amplitudes are exact, and so are the probabilities.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::carrier::{Carrier, Elem};
use crate::error::{Error, Result};
use crate::multiset::FinMultiset;
use crate::rel::Rel;
use crate::semiring::{Prob, QISqrt2, QSqrt2, Semiring, Value};

pub const HADAMARD_WALK: &str = "hadamard_walk";

/// `ℤ + ℤ`.
pub fn walk_carrier() -> Carrier {
    Carrier::sum(Carrier::IntLine, Carrier::IntLine)
}

fn inv_sqrt2(semiring: Semiring) -> Result<Value> {
    Ok(match semiring {
        Semiring::QSqrt2 => Value::QSqrt2(QSqrt2::inv_sqrt2()),
        Semiring::QISqrt2 => Value::QISqrt2(QISqrt2::real(QSqrt2::inv_sqrt2())),
        Semiring::C64 => Value::c64(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        Semiring::F64 => Value::F64(std::f64::consts::FRAC_1_SQRT_2),
        s => {
            return Err(Error::InvalidArgument(format!(
                "the Hadamard walk needs 1/√2; {s} has none"
            )))
        }
    })
}

/// `κᵢ(n)`, with `i = 1` for the left-moving and `i = 2` for the right-moving
/// component.
pub fn site(i: usize, n: i64) -> Elem {
    Elem::inj(i, Elem::Int(n))
}

fn split_site(e: &Elem) -> Option<(usize, i64)> {
    let (i, n) = e.as_inj()?;
    Some((i, n.as_int()?))
}

/// One step of the walk as a lazy relation on `ℤ + ℤ`.
pub fn hadamard_step(semiring: Semiring) -> Result<Rel> {
    let h = inv_sqrt2(semiring)?;
    let mh = h.neg()?;
    let (h1, mh1) = (h.clone(), mh.clone());
    let ms = move |pairs: [(Elem, Value); 2]| FinMultiset::from_pairs(semiring, pairs).expect("one semiring");
    let row = move |x: &Elem| match split_site(x) {
        Some((1, n)) => ms([(site(1, n - 1), h1.clone()), (site(2, n + 1), h1.clone())]),
        Some((_, n)) => ms([(site(1, n - 1), h1.clone()), (site(2, n + 1), mh1.clone())]),
        None => FinMultiset::new(semiring),
    };
    let col = move |y: &Elem| match split_site(y) {
        Some((1, m)) => ms([(site(1, m + 1), h.clone()), (site(2, m + 1), h.clone())]),
        Some((_, m)) => ms([(site(1, m - 1), h.clone()), (site(2, m - 1), mh.clone())]),
        None => FinMultiset::new(semiring),
    };
    Ok(Rel::lazy(semiring, walk_carrier(), walk_carrier(), row, col).with_builtin(HADAMARD_WALK))
}

/// A unit vector of amplitudes on `ℤ + ℤ`.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkState {
    amplitudes: FinMultiset,
}

impl WalkState {
    /// Validates membership in `ℤ + ℤ` and `Σ ‖amp‖² = 1` (within `tol` for
    /// floats).
    pub fn new(amplitudes: FinMultiset, tol: f64) -> Result<Self> {
        let carrier = walk_carrier();
        for e in amplitudes.support() {
            carrier.check_contains(e)?;
        }
        let n = amplitudes.norm_sq();
        if !n.approx_eq(&amplitudes.semiring().one(), tol) {
            return Err(Error::InvalidArgument(format!(
                "initial state has squared norm {n}, not 1"
            )));
        }
        Ok(WalkState { amplitudes })
    }

    /// `1·κᵢ(n)`.
    pub fn basis(semiring: Semiring, i: usize, n: i64) -> Self {
        WalkState {
            amplitudes: FinMultiset::unit(semiring, site(i, n)),
        }
    }

    /// `(1/√2)·κ₁(0) + (i/√2)·κ₂(0)`, whose position distribution is
    /// symmetric about the origin at every step.
    pub fn symmetric(semiring: Semiring) -> Result<Self> {
        let (a, b) = match semiring {
            Semiring::QISqrt2 => {
                let h = QSqrt2::inv_sqrt2();
                (
                    Value::QISqrt2(QISqrt2::real(h.clone())),
                    Value::QISqrt2(QISqrt2::new(QSqrt2::zero(), h)),
                )
            }
            Semiring::C64 => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                (Value::c64(h, 0.0), Value::c64(0.0, h))
            }
            s => {
                return Err(Error::InvalidArgument(format!(
                    "the symmetric state needs i/√2; {s} has none"
                )))
            }
        };
        let m = FinMultiset::from_pairs(semiring, [(site(1, 0), a), (site(2, 0), b)])?;
        Ok(WalkState { amplitudes: m })
    }

    pub fn amplitudes(&self) -> &FinMultiset {
        &self.amplitudes
    }

    pub fn semiring(&self) -> Semiring {
        self.amplitudes.semiring()
    }

    /// Probability of each `(branch, position)`.
    pub fn joint_distribution(&self) -> Result<BTreeMap<(Branch, i64), Prob>> {
        let mut out = BTreeMap::new();
        for (e, v) in &self.amplitudes {
            let (i, n) = split_site(e).expect("validated site");
            out.insert((Branch::from_index(i), n), v.norm_sq().to_unit_interval()?);
        }
        Ok(out)
    }

    /// Probability of each position, summed over both branches.
    pub fn position_distribution(&self) -> Result<BTreeMap<i64, Prob>> {
        let mut out: BTreeMap<i64, Prob> = BTreeMap::new();
        for ((_, n), p) in self.joint_distribution()? {
            let acc = out.remove(&n).unwrap_or_else(|| p.zero_like());
            out.insert(n, acc.add(&p));
        }
        Ok(out)
    }

    /// `distribution(marginalize_coin)` as `(branch, position, probability)`
    /// rows; `branch` is `None` when marginalized.
    pub fn distribution(&self, marginalize_coin: bool) -> Result<Vec<(Option<Branch>, i64, Prob)>> {
        if marginalize_coin {
            Ok(self
                .position_distribution()?
                .into_iter()
                .map(|(n, p)| (None, n, p))
                .collect())
        } else {
            Ok(self
                .joint_distribution()?
                .into_iter()
                .map(|((b, n), p)| (Some(b), n, p))
                .collect())
        }
    }

    /// Sum of all probabilities.
    pub fn total_probability(&self) -> Result<Prob> {
        let exact = !self.semiring().is_float();
        let init = if exact {
            Prob::Exact(num_rational::BigRational::from_integer(0.into()))
        } else {
            Prob::Float(0.0)
        };
        Ok(self
            .joint_distribution()?
            .values()
            .fold(init, |acc, p| acc.add(p)))
    }

    /// Distinct positions in the support.
    pub fn positions(&self) -> BTreeSet<i64> {
        self.amplitudes
            .support()
            .filter_map(|e| split_site(e).map(|(_, n)| n))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Branch {
    L,
    R,
}

impl Branch {
    fn from_index(i: usize) -> Branch {
        if i == 1 {
            Branch::L
        } else {
            Branch::R
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::L => "L",
            Branch::R => "R",
        })
    }
}

/// `steps`-fold application of `q` to `init`.
pub fn iterate(q: &Rel, init: &WalkState, steps: usize) -> Result<Vec<WalkState>> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut cur = init.clone();
    out.push(cur.clone());
    for _ in 0..steps {
        cur = WalkState {
            amplitudes: q.apply_state(&cur.amplitudes)?,
        };
        out.push(cur.clone());
    }
    Ok(out)
}

/// The Hadamard walk run for `steps` steps from `init`; returns the states
/// at steps `0..=steps`.
pub fn walk_trajectory(init: &WalkState, steps: usize) -> Result<Vec<WalkState>> {
    let q = hadamard_step(init.semiring())?;
    iterate(&q, init, steps)
}

/// The state after `steps` steps of the Hadamard walk.
pub fn walk_run(init: &WalkState, steps: usize) -> Result<WalkState> {
    Ok(walk_trajectory(init, steps)?.pop().expect("nonempty"))
}

/// `ℤ + ℤ` restricted to positions `lo..=hi`, in canonical order.
pub fn int_sum_window(lo: i64, hi: i64) -> Vec<Elem> {
    (1..=2)
        .flat_map(|i| (lo..=hi).map(move |n| site(i, n)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum UnitaryCheck {
    /// `q†∘q = id`.
    Isometry,
    /// `q∘q† = id`.
    Coisometry,
}

#[derive(Clone, Debug, Default)]
pub struct WindowReport {
    /// Pairs `(u, v)` whose composite entry was computed exactly from the
    /// window and matched `δ(u, v)`.
    pub verified: usize,
    /// Window elements whose neighbourhood leaves the window: their
    /// composite entries cannot be computed from the window alone.
    pub indeterminate: Vec<(UnitaryCheck, Elem)>,
    /// `(check, u, v, computed value)` for every mismatch.
    pub failures: Vec<(UnitaryCheck, Elem, Elem, Value)>,
}

impl WindowReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.verified > 0
    }
}

/// Checks `(q†∘q)(u, v) = δ(u, v)` and `(q∘q†)(u, v) = δ(u, v)` for all
/// `u, v` in `window`, using only the entries of `q` inside the window.
/// An element counts as interior when its row (for `q†∘q`) or column (for
/// `q∘q†`) is supported inside the window; only interior elements can be
/// decided, the rest are reported as indeterminate.
pub fn verify_window_unitary(q: &Rel, window: &[Elem], tol: f64) -> WindowReport {
    let set: BTreeSet<&Elem> = window.iter().collect();
    let semiring = q.semiring();
    let one = semiring.one();
    let zero = semiring.zero();
    let mut report = WindowReport::default();
    for (kind, vecs) in [
        (
            UnitaryCheck::Isometry,
            window.iter().map(|u| q.row(u).into_owned()).collect::<Vec<_>>(),
        ),
        (
            UnitaryCheck::Coisometry,
            window.iter().map(|u| q.col(u).into_owned()).collect::<Vec<_>>(),
        ),
    ] {
        let truncated: Vec<FinMultiset> = vecs.iter().map(|m| m.filter(|e| set.contains(e))).collect();
        for (i, u) in window.iter().enumerate() {
            if truncated[i].len() != vecs[i].len() {
                report.indeterminate.push((kind.clone(), u.clone()));
                continue;
            }
            for (j, v) in window.iter().enumerate() {
                // (q†∘q)(u, v) = ⟨q(v, −), q(u, −)⟩, (q∘q†)(u, v) = ⟨q(−, u), q(−, v)⟩
                let val = match kind {
                    UnitaryCheck::Isometry => truncated[j].inner_unchecked(&truncated[i]),
                    UnitaryCheck::Coisometry => truncated[i].inner_unchecked(&truncated[j]),
                };
                let expect = if i == j { &one } else { &zero };
                if val.approx_eq(expect, tol) {
                    report.verified += 1;
                } else {
                    report.failures.push((kind.clone(), u.clone(), v.clone(), val));
                }
            }
        }
    }
    report
}
