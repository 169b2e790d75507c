//! Objects of the category: carriers and their elements.
//!
//! Elements are self-describing values with a derived total order. That order
//! is the canonical order used everywhere for iteration and serialization:
//! finite carriers by declared position, integers numerically, sum elements
//! left-before-right, pairs lexicographically, monomials by degree first.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::multiset::FinMultiset;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Elem {
    /// The single element of the unit carrier.
    Star,
    /// A named element of a finite carrier; `idx` is its declared position.
    Named { idx: u32, name: Arc<str> },
    Int(i64),
    Left(Box<Elem>),
    Right(Box<Elem>),
    Pair(Box<Elem>, Box<Elem>),
    Mono(Monomial),
    /// A base element kept by a basis extension.
    Pass(Box<Elem>),
    /// The `i`-th adjoined vector of a basis extension.
    Adjoined(u32),
}

impl Elem {
    pub fn left(e: Elem) -> Elem {
        Elem::Left(Box::new(e))
    }

    pub fn right(e: Elem) -> Elem {
        Elem::Right(Box::new(e))
    }

    /// Injection into the `i`-th summand (1 or 2).
    pub fn inj(i: usize, e: Elem) -> Elem {
        if i == 1 {
            Elem::left(e)
        } else {
            Elem::right(e)
        }
    }

    pub fn pair(a: Elem, b: Elem) -> Elem {
        Elem::Pair(Box::new(a), Box::new(b))
    }

    pub fn pass(e: Elem) -> Elem {
        Elem::Pass(Box::new(e))
    }

    pub fn as_pair(&self) -> Option<(&Elem, &Elem)> {
        match self {
            Elem::Pair(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Elem::Int(n) => Some(*n),
            _ => None,
        }
    }

    /// Splits a sum element into (summand index, payload).
    pub fn as_inj(&self) -> Option<(usize, &Elem)> {
        match self {
            Elem::Left(e) => Some((1, e)),
            Elem::Right(e) => Some((2, e)),
            _ => None,
        }
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::Star => f.write_str("*"),
            Elem::Named { name, .. } => f.write_str(name),
            Elem::Int(n) => write!(f, "{n}"),
            Elem::Left(e) => write!(f, "L({e})"),
            Elem::Right(e) => write!(f, "R({e})"),
            Elem::Pair(a, b) => write!(f, "({a}, {b})"),
            Elem::Mono(m) => write!(f, "{m}"),
            Elem::Pass(e) => write!(f, "{e}"),
            Elem::Adjoined(i) => write!(f, "vec#{i}"),
        }
    }
}

/// A monomial `x₁^{n₁}⋯x_k^{n_k}`: a finitely supported map from variables to
/// positive exponents. The empty monomial is `1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    exps: Vec<(Elem, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(v: Elem) -> Self {
        Monomial { exps: vec![(v, 1)] }
    }

    /// Builds a monomial from (variable, exponent) pairs; repeated variables
    /// accumulate and zero exponents are dropped.
    pub fn from_exponents(pairs: impl IntoIterator<Item = (Elem, u32)>) -> Self {
        let mut exps: Vec<(Elem, u32)> = Vec::new();
        for (v, n) in pairs {
            match exps.binary_search_by(|(w, _)| w.cmp(&v)) {
                Ok(i) => exps[i].1 += n,
                Err(i) => exps.insert(i, (v, n)),
            }
        }
        exps.retain(|(_, n)| *n > 0);
        Monomial { exps }
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().map(|(_, n)| n).sum()
    }

    pub fn exponent(&self, v: &Elem) -> u32 {
        self.exps
            .binary_search_by(|(w, _)| w.cmp(v))
            .map(|i| self.exps[i].1)
            .unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Elem, u32)> {
        self.exps.iter().map(|(v, n)| (v, *n))
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        Monomial::from_exponents(self.exps.iter().chain(o.exps.iter()).cloned())
    }

    pub fn relabel(&self, f: impl Fn(&Elem) -> Elem) -> Monomial {
        Monomial::from_exponents(self.exps.iter().map(|(v, n)| (f(v), *n)))
    }

    /// `φ ⋆ ψ`: relabel into the sum of variable sets and multiply.
    pub fn star(phi: &Monomial, psi: &Monomial) -> Monomial {
        phi.relabel(|v| Elem::left(v.clone()))
            .mul(&psi.relabel(|v| Elem::right(v.clone())))
    }

    /// Inverse of [`Monomial::star`]: restriction to each summand. Returns
    /// `None` if some variable is not tagged with a summand.
    pub fn split(&self) -> Option<(Monomial, Monomial)> {
        let mut left = Vec::new();
        let mut right = Vec::new();
        for (v, n) in &self.exps {
            match v {
                Elem::Left(x) => left.push(((**x).clone(), *n)),
                Elem::Right(y) => right.push(((**y).clone(), *n)),
                _ => return None,
            }
        }
        Some((Monomial::from_exponents(left), Monomial::from_exponents(right)))
    }

    /// All monomials in `vars` of total degree at most `max_degree`, in
    /// canonical order.
    pub fn enumerate(vars: &[Elem], max_degree: u32) -> Vec<Monomial> {
        fn go(vars: &[Elem], budget: u32, acc: &mut Vec<(Elem, u32)>, out: &mut Vec<Monomial>) {
            let Some((v, rest)) = vars.split_first() else {
                out.push(Monomial::from_exponents(acc.iter().cloned()));
                return;
            };
            for n in 0..=budget {
                acc.push((v.clone(), n));
                go(rest, budget - n, acc, out);
                acc.pop();
            }
        }
        let mut out = Vec::new();
        go(vars, max_degree, &mut Vec::new(), &mut out);
        out.sort();
        out
    }
}

impl Ord for Monomial {
    fn cmp(&self, o: &Self) -> Ordering {
        self.degree()
            .cmp(&o.degree())
            .then_with(|| self.exps.cmp(&o.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return f.write_str("1");
        }
        for (i, (v, n)) in self.exps.iter().enumerate() {
            if i > 0 {
                f.write_str("·")?;
            }
            if *n == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{n}")?;
            }
        }
        Ok(())
    }
}

/// The kernel object `(X − X_r) ∪ B_r` of a dagger kernel.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisExtension {
    pub base: Carrier,
    /// Base elements replaced by the adjoined vectors (the touched set).
    pub removed: BTreeSet<Elem>,
    pub adjoined: Vec<FinMultiset>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Carrier {
    Empty,
    Unit,
    Finite(Arc<[Arc<str>]>),
    IntLine,
    Sum(Box<Carrier>, Box<Carrier>),
    Pair(Box<Carrier>, Box<Carrier>),
    /// Monomials whose variables range over the given carrier.
    Monomials(Box<Carrier>),
    BasisExtension(Arc<BasisExtension>),
}

impl Carrier {
    pub fn finite<S: AsRef<str>>(names: impl IntoIterator<Item = S>) -> Result<Carrier> {
        let names: Vec<Arc<str>> = names.into_iter().map(|s| Arc::from(s.as_ref())).collect();
        let mut seen = BTreeSet::new();
        for n in &names {
            if !seen.insert(n.clone()) {
                return Err(Error::DuplicateElement(n.to_string()));
            }
        }
        Ok(Carrier::Finite(names.into()))
    }

    /// The finite carrier `{prefix0, prefix1, …}` of size `n`.
    pub fn numbered(prefix: &str, n: usize) -> Carrier {
        Carrier::finite((0..n).map(|i| format!("{prefix}{i}"))).expect("distinct names")
    }

    pub fn sum(a: Carrier, b: Carrier) -> Carrier {
        Carrier::Sum(Box::new(a), Box::new(b))
    }

    pub fn pair(a: Carrier, b: Carrier) -> Carrier {
        Carrier::Pair(Box::new(a), Box::new(b))
    }

    pub fn monomials(vars: Carrier) -> Carrier {
        Carrier::Monomials(Box::new(vars))
    }

    /// Looks up a named element of a finite carrier.
    pub fn elem(&self, name: &str) -> Option<Elem> {
        match self {
            Carrier::Finite(names) => names
                .iter()
                .position(|n| &**n == name)
                .map(|i| Elem::Named {
                    idx: i as u32,
                    name: names[i].clone(),
                }),
            _ => None,
        }
    }

    /// Like [`Carrier::elem`] but panics on unknown names; for tests and examples.
    pub fn at(&self, name: &str) -> Elem {
        self.elem(name)
            .unwrap_or_else(|| panic!("no element {name:?} in carrier {self}"))
    }

    /// Number of elements, or `None` for infinite carriers.
    pub fn size(&self) -> Option<usize> {
        match self {
            Carrier::Empty => Some(0),
            Carrier::Unit => Some(1),
            Carrier::Finite(names) => Some(names.len()),
            Carrier::IntLine => None,
            Carrier::Sum(a, b) => match (a.size(), b.size()) {
                (Some(x), Some(y)) => Some(x + y),
                _ => None,
            },
            Carrier::Pair(a, b) => match (a.size(), b.size()) {
                (Some(0), _) | (_, Some(0)) => Some(0),
                (Some(x), Some(y)) => Some(x * y),
                _ => None,
            },
            Carrier::Monomials(v) => match v.size() {
                Some(0) => Some(1),
                _ => None,
            },
            Carrier::BasisExtension(ext) => ext
                .base
                .size()
                .map(|n| n - ext.removed.len() + ext.adjoined.len()),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.size().is_some()
    }

    /// All elements in canonical order, for finite carriers.
    pub fn elements(&self) -> Option<Vec<Elem>> {
        Some(match self {
            Carrier::Empty => vec![],
            Carrier::Unit => vec![Elem::Star],
            Carrier::Finite(names) => names
                .iter()
                .enumerate()
                .map(|(i, n)| Elem::Named {
                    idx: i as u32,
                    name: n.clone(),
                })
                .collect(),
            Carrier::IntLine => return None,
            Carrier::Sum(a, b) => {
                let mut v: Vec<Elem> = a.elements()?.into_iter().map(Elem::left).collect();
                v.extend(b.elements()?.into_iter().map(Elem::right));
                v
            }
            Carrier::Pair(a, b) => {
                if self.size()? == 0 {
                    return Some(vec![]);
                }
                let bs = b.elements()?;
                a.elements()?
                    .into_iter()
                    .flat_map(|x| bs.iter().map(move |y| Elem::pair(x.clone(), y.clone())))
                    .collect()
            }
            Carrier::Monomials(v) => {
                if v.size()? == 0 {
                    vec![Elem::Mono(Monomial::one())]
                } else {
                    return None;
                }
            }
            Carrier::BasisExtension(ext) => {
                let mut v: Vec<Elem> = ext
                    .base
                    .elements()?
                    .into_iter()
                    .filter(|e| !ext.removed.contains(e))
                    .map(Elem::pass)
                    .collect();
                v.extend((0..ext.adjoined.len() as u32).map(Elem::Adjoined));
                v
            }
        })
    }

    /// Elements for iteration; errors for infinite carriers.
    pub fn require_elements(&self) -> Result<Vec<Elem>> {
        self.elements()
            .ok_or_else(|| Error::InfiniteCarrier(self.to_string()))
    }

    pub fn contains(&self, e: &Elem) -> bool {
        match (self, e) {
            (Carrier::Unit, Elem::Star) => true,
            (Carrier::Finite(names), Elem::Named { idx, name }) => names
                .get(*idx as usize)
                .is_some_and(|n| n == name),
            (Carrier::IntLine, Elem::Int(_)) => true,
            (Carrier::Sum(a, _), Elem::Left(x)) => a.contains(x),
            (Carrier::Sum(_, b), Elem::Right(y)) => b.contains(y),
            (Carrier::Pair(a, b), Elem::Pair(x, y)) => a.contains(x) && b.contains(y),
            (Carrier::Monomials(vars), Elem::Mono(m)) => m.iter().all(|(v, _)| vars.contains(v)),
            (Carrier::BasisExtension(ext), Elem::Pass(x)) => {
                ext.base.contains(x) && !ext.removed.contains(x)
            }
            (Carrier::BasisExtension(ext), Elem::Adjoined(i)) => (*i as usize) < ext.adjoined.len(),
            _ => false,
        }
    }

    pub fn check_contains(&self, e: &Elem) -> Result<()> {
        if self.contains(e) {
            Ok(())
        } else {
            Err(Error::NotInCarrier {
                elem: e.to_string(),
                carrier: self.to_string(),
            })
        }
    }

    /// The two summands of a sum carrier.
    pub fn as_sum(&self) -> Option<(&Carrier, &Carrier)> {
        match self {
            Carrier::Sum(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn as_pair(&self) -> Option<(&Carrier, &Carrier)> {
        match self {
            Carrier::Pair(a, b) => Some((a, b)),
            _ => None,
        }
    }
}

impl fmt::Display for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Carrier::Empty => f.write_str("0"),
            Carrier::Unit => f.write_str("1"),
            Carrier::Finite(names) => {
                f.write_str("{")?;
                for (i, n) in names.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    f.write_str(n)?;
                }
                f.write_str("}")
            }
            Carrier::IntLine => f.write_str("ℤ"),
            Carrier::Sum(a, b) => write!(f, "({a} + {b})"),
            Carrier::Pair(a, b) => write!(f, "({a} × {b})"),
            Carrier::Monomials(v) => write!(f, "Mon({v})"),
            Carrier::BasisExtension(ext) => write!(
                f,
                "Ker[{} − {} touched + {} vectors]",
                ext.base,
                ext.removed.len(),
                ext.adjoined.len()
            ),
        }
    }
}
