//! Finite orthomodular lattices and antitone Galois connections between them.
//!
//! A morphism `X → Y` is a pair `r_#: X → Y`, `r^#: Y → X` of antitone maps
//! with `x ≤ r^#(y) ⟺ y ≤ r_#(x)`. Composites insert the orthocomplement
//! between the two antitone maps, the dagger swaps them, and every
//! connection corresponds to the 0/1 relation `r(x, y) = 1 ⟺ r_#(x⊥)⊥ ≤ y`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthomodularLattice {
    names: Vec<String>,
    /// `leq[x][y]` iff `x ≤ y`, reflexive-transitively closed.
    leq: Vec<Vec<bool>>,
    ortho: Vec<usize>,
    meet: Vec<Vec<Option<usize>>>,
    join: Vec<Vec<Option<usize>>>,
    bottom: usize,
    top: usize,
}

impl OrthomodularLattice {
    /// Builds a lattice from element names, generating order pairs (closed
    /// reflexively and transitively) and orthocomplement pairs `(x, x⊥)`.
    /// A pair `(x, y)` also sets `y⊥ = x` unless `y⊥` is given explicitly.
    ///
    /// Fails on unknown names, a non-antisymmetric order, a missing
    /// orthocomplement, or a missing bottom or top. Missing meets and joins
    /// and violated axioms are left for [`validate_oml`] to report.
    pub fn new<S: AsRef<str>>(names: &[S], leq_pairs: &[(S, S)], ortho_pairs: &[(S, S)]) -> Result<Self> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        let n = names.len();
        if n == 0 {
            return Err(Error::InvalidLattice("no elements".into()));
        }
        let mut index = BTreeMap::new();
        for (i, s) in names.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::DuplicateElement(s.clone()));
            }
        }
        let idx = |s: &S| {
            index
                .get(s.as_ref())
                .copied()
                .ok_or_else(|| Error::InvalidLattice(format!("unknown element {:?}", s.as_ref())))
        };
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in leq_pairs {
            leq[idx(a)?][idx(b)?] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if leq[i][j] && leq[j][i] {
                    return Err(Error::InvalidLattice(format!(
                        "order is not antisymmetric: {} and {}",
                        names[i], names[j]
                    )));
                }
            }
        }
        let mut ortho: Vec<Option<usize>> = vec![None; n];
        for (a, b) in ortho_pairs {
            ortho[idx(a)?] = Some(idx(b)?);
        }
        for (a, b) in ortho_pairs {
            let (a, b) = (idx(a)?, idx(b)?);
            if ortho[b].is_none() {
                ortho[b] = Some(a);
            }
        }
        let ortho: Vec<usize> = ortho
            .into_iter()
            .enumerate()
            .map(|(i, o)| o.ok_or_else(|| Error::InvalidLattice(format!("{} has no orthocomplement", names[i]))))
            .collect::<Result<_>>()?;
        let bottom = (0..n)
            .find(|&b| (0..n).all(|x| leq[b][x]))
            .ok_or_else(|| Error::InvalidLattice("no bottom element".into()))?;
        let top = (0..n)
            .find(|&t| (0..n).all(|x| leq[x][t]))
            .ok_or_else(|| Error::InvalidLattice("no top element".into()))?;
        let bound = |x: usize, y: usize, lower: bool| {
            let ok = |z: usize| if lower { leq[z][x] && leq[z][y] } else { leq[x][z] && leq[y][z] };
            let cands: Vec<usize> = (0..n).filter(|&z| ok(z)).collect();
            cands
                .iter()
                .copied()
                .find(|&m| cands.iter().all(|&z| if lower { leq[z][m] } else { leq[m][z] }))
        };
        let meet = (0..n).map(|x| (0..n).map(|y| bound(x, y, true)).collect()).collect();
        let join = (0..n).map(|x| (0..n).map(|y| bound(x, y, false)).collect()).collect();
        Ok(OrthomodularLattice {
            names,
            leq,
            ortho,
            meet,
            join,
            bottom,
            top,
        })
    }

    /// The powerset of `{0, …, k−1}` with complement; elements are named by
    /// their members, e.g. `"{}"`, `"{0,2}"`.
    pub fn boolean(k: usize) -> Self {
        let n = 1usize << k;
        let name = |m: usize| {
            let members: Vec<String> = (0..k).filter(|i| m >> i & 1 == 1).map(|i| i.to_string()).collect();
            format!("{{{}}}", members.join(","))
        };
        let names: Vec<String> = (0..n).map(name).collect();
        let mut leq = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a & b == a && a != b {
                    leq.push((name(a), name(b)));
                }
            }
        }
        let ortho: Vec<(String, String)> = (0..n).map(|a| (name(a), name(!a & (n - 1)))).collect();
        OrthomodularLattice::new(&names, &leq, &ortho).expect("powerset lattice")
    }

    /// `MO2`: `0 < a, a⊥, b, b⊥ < 1` with no other comparabilities.
    pub fn mo2() -> Self {
        let names = ["0", "a", "a'", "b", "b'", "1"];
        let mut leq = Vec::new();
        for m in &names[1..5] {
            leq.push(("0", *m));
            leq.push((*m, "1"));
        }
        let ortho = [("0", "1"), ("a", "a'"), ("b", "b'")];
        OrthomodularLattice::new(&names, &leq, &ortho).expect("MO2")
    }

    /// The hexagon `0 < a < b < 1`, `0 < b⊥ < a⊥ < 1`: an ortholattice that
    /// is not orthomodular.
    pub fn o6() -> Self {
        let names = ["0", "a", "b", "b'", "a'", "1"];
        let leq = [("0", "a"), ("a", "b"), ("b", "1"), ("0", "b'"), ("b'", "a'"), ("a'", "1")];
        let ortho = [("0", "1"), ("a", "a'"), ("b", "b'")];
        OrthomodularLattice::new(&names, &leq, &ortho).expect("O6")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|s| s == name)
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.leq[x][y]
    }

    pub fn ortho(&self, x: usize) -> usize {
        self.ortho[x]
    }

    pub fn meet(&self, x: usize, y: usize) -> Option<usize> {
        self.meet[x][y]
    }

    pub fn join(&self, x: usize, y: usize) -> Option<usize> {
        self.join[x][y]
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    /// Strictly generating order pairs `(x, y)`, `x < y`, by name.
    pub fn order_pairs(&self) -> Vec<(String, String)> {
        let n = self.len();
        let mut out = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if x != y && self.leq[x][y] {
                    out.push((self.names[x].clone(), self.names[y].clone()));
                }
            }
        }
        out
    }

    fn meet_all(&self, xs: impl IntoIterator<Item = usize>) -> Option<usize> {
        xs.into_iter().try_fold(self.top, |acc, x| self.meet(acc, x))
    }

    fn join_all(&self, xs: impl IntoIterator<Item = usize>) -> Option<usize> {
        xs.into_iter().try_fold(self.bottom, |acc, x| self.join(acc, x))
    }

    /// Elements that are not the join of the elements strictly below them.
    pub fn join_irreducibles(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&x| {
                x != self.bottom
                    && self.join_all((0..self.len()).filter(|&z| z != x && self.leq[z][x])) != Some(x)
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Axiom {
    MeetExists,
    JoinExists,
    /// `x⊥⊥ = x`.
    Involution,
    /// `x ≤ y ⟹ y⊥ ≤ x⊥`.
    Antitone,
    /// `x ∧ x⊥ = 0`.
    Noncontradiction,
    /// `x ∨ x⊥ = 1`.
    ExcludedMiddle,
    /// `x ≤ y ⟹ y = x ∨ (x⊥ ∧ y)`.
    Orthomodular,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomFailure {
    pub axiom: Axiom,
    pub witness: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OmlReport {
    pub failures: Vec<AxiomFailure>,
}

impl OmlReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn fails(&self, axiom: &Axiom) -> bool {
        self.failures.iter().any(|f| &f.axiom == axiom)
    }
}

impl fmt::Display for OmlReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.failures.is_empty() {
            return writeln!(f, "orthomodular lattice: all axioms hold");
        }
        for fail in &self.failures {
            writeln!(f, "{:?} fails at ({})", fail.axiom, fail.witness.join(", "))?;
        }
        Ok(())
    }
}

/// Exhaustively checks the lattice, ortholattice and orthomodular axioms.
pub fn validate_oml(l: &OrthomodularLattice) -> OmlReport {
    let n = l.len();
    let mut failures = Vec::new();
    let mut fail = |axiom: Axiom, w: &[usize]| {
        failures.push(AxiomFailure {
            axiom,
            witness: w.iter().map(|&i| l.name(i).to_string()).collect(),
        })
    };
    for x in 0..n {
        for y in 0..n {
            if l.meet(x, y).is_none() {
                fail(Axiom::MeetExists, &[x, y]);
            }
            if l.join(x, y).is_none() {
                fail(Axiom::JoinExists, &[x, y]);
            }
        }
    }
    for x in 0..n {
        let xp = l.ortho(x);
        if l.ortho(xp) != x {
            fail(Axiom::Involution, &[x]);
        }
        if l.meet(x, xp) != Some(l.bottom()) {
            fail(Axiom::Noncontradiction, &[x]);
        }
        if l.join(x, xp) != Some(l.top()) {
            fail(Axiom::ExcludedMiddle, &[x]);
        }
        for y in 0..n {
            if !l.leq(x, y) {
                continue;
            }
            if !l.leq(l.ortho(y), xp) {
                fail(Axiom::Antitone, &[x, y]);
            }
            let rhs = l.meet(xp, y).and_then(|m| l.join(x, m));
            if rhs != Some(y) {
                fail(Axiom::Orthomodular, &[x, y]);
            }
        }
    }
    OmlReport { failures }
}

/// An antitone Galois connection `source → target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisConnection {
    pub source: Arc<OrthomodularLattice>,
    pub target: Arc<OrthomodularLattice>,
    /// `r_#: source → target`.
    pub sharp: Vec<usize>,
    /// `r^#: target → source`.
    pub cosharp: Vec<usize>,
}

impl GaloisConnection {
    pub fn new(
        source: Arc<OrthomodularLattice>,
        target: Arc<OrthomodularLattice>,
        sharp: Vec<usize>,
        cosharp: Vec<usize>,
    ) -> Result<Self> {
        if sharp.len() != source.len() || cosharp.len() != target.len() {
            return Err(Error::InvalidArgument("map lengths do not match the lattices".into()));
        }
        if sharp.iter().any(|&y| y >= target.len()) || cosharp.iter().any(|&x| x >= source.len()) {
            return Err(Error::InvalidArgument("map value out of range".into()));
        }
        Ok(GaloisConnection {
            source,
            target,
            sharp,
            cosharp,
        })
    }

    /// The identity morphism: both maps are `⊥`.
    pub fn identity(l: Arc<OrthomodularLattice>) -> Self {
        let o: Vec<usize> = (0..l.len()).map(|x| l.ortho(x)).collect();
        GaloisConnection {
            source: l.clone(),
            target: l,
            sharp: o.clone(),
            cosharp: o,
        }
    }

    /// A pair with both maps constantly `⊤`.
    pub fn constant_top(source: Arc<OrthomodularLattice>, target: Arc<OrthomodularLattice>) -> Self {
        GaloisConnection {
            sharp: vec![target.top(); source.len()],
            cosharp: vec![source.top(); target.len()],
            source,
            target,
        }
    }

    /// First pair `(x, y)` violating `x ≤ r^#(y) ⟺ y ≤ r_#(x)`.
    pub fn violation(&self) -> Option<(usize, usize)> {
        for x in 0..self.source.len() {
            for y in 0..self.target.len() {
                if self.source.leq(x, self.cosharp[y]) != self.target.leq(y, self.sharp[x]) {
                    return Some((x, y));
                }
            }
        }
        None
    }
}

pub fn galois_check(g: &GaloisConnection) -> bool {
    g.violation().is_none()
}

/// `s ∘ r`: `(s∘r)_# = s_# ∘ ⊥ ∘ r_#`, `(s∘r)^# = r^# ∘ ⊥ ∘ s^#`.
pub fn galois_compose(r: &GaloisConnection, s: &GaloisConnection) -> Result<GaloisConnection> {
    if r.target != s.source {
        return Err(Error::CarrierMismatch("target of the first connection is not the source of the second".into()));
    }
    let mid = &r.target;
    Ok(GaloisConnection {
        source: r.source.clone(),
        target: s.target.clone(),
        sharp: r.sharp.iter().map(|&y| s.sharp[mid.ortho(y)]).collect(),
        cosharp: s.cosharp.iter().map(|&y| r.cosharp[mid.ortho(y)]).collect(),
    })
}

pub fn galois_dagger(r: &GaloisConnection) -> GaloisConnection {
    GaloisConnection {
        source: r.target.clone(),
        target: r.source.clone(),
        sharp: r.cosharp.clone(),
        cosharp: r.sharp.clone(),
    }
}

/// The 0/1 table `r(x, y) = 1 ⟺ r_*(x)⊥ ≤ y` with `r_* = r_# ∘ ⊥`, after
/// checking the two-sided form `r_*(x)⊥ ≤ y ⟺ x⊥ ≤ r^*(y)`.
pub fn galois_to_tame(r: &GaloisConnection) -> Result<Vec<Vec<bool>>> {
    let (src, tgt) = (&r.source, &r.target);
    let lower = |x: usize| tgt.ortho(r.sharp[src.ortho(x)]);
    let upper = |y: usize| r.cosharp[tgt.ortho(y)];
    let mut table = vec![vec![false; tgt.len()]; src.len()];
    for (x, row) in table.iter_mut().enumerate() {
        for (y, cell) in row.iter_mut().enumerate() {
            let a = tgt.leq(lower(x), y);
            let b = src.leq(src.ortho(x), upper(y));
            if a != b {
                return Err(Error::NotTame(format!(
                    "adjointness fails at ({}, {})",
                    src.name(x),
                    tgt.name(y)
                )));
            }
            *cell = a;
        }
    }
    Ok(table)
}

/// Least element of `{i : keep(i)}` when that set is a principal upset.
fn principal_upset(l: &OrthomodularLattice, keep: impl Fn(usize) -> bool) -> Option<usize> {
    let set: Vec<usize> = (0..l.len()).filter(|&i| keep(i)).collect();
    let m = set.iter().copied().find(|&m| set.iter().all(|&z| l.leq(m, z)))?;
    (0..l.len())
        .all(|z| keep(z) == l.leq(m, z))
        .then_some(m)
}

/// Inverse of [`galois_to_tame`].
pub fn tame_to_galois(
    source: Arc<OrthomodularLattice>,
    target: Arc<OrthomodularLattice>,
    table: &[Vec<bool>],
) -> Result<GaloisConnection> {
    let not_tame = |what: String| Error::NotTame(what);
    if table.len() != source.len() || table.iter().any(|r| r.len() != target.len()) {
        return Err(Error::InvalidArgument("table shape does not match the lattices".into()));
    }
    // r_#(x) = m(x⊥)⊥ where ↑m(x) = {y : r(x, y)}.
    let mut sharp = vec![0; source.len()];
    for (x, s) in sharp.iter_mut().enumerate() {
        let xp = source.ortho(x);
        let m = principal_upset(&target, |y| table[xp][y])
            .ok_or_else(|| not_tame(format!("row {} is not a principal upset", source.name(xp))))?;
        *s = target.ortho(m);
    }
    // r^#(y) = n(y⊥)⊥ where ↑n(y) = {x : r(x, y)}.
    let mut cosharp = vec![0; target.len()];
    for (y, c) in cosharp.iter_mut().enumerate() {
        let yp = target.ortho(y);
        let n = principal_upset(&source, |x| table[x][yp])
            .ok_or_else(|| not_tame(format!("column {} is not a principal upset", target.name(yp))))?;
        *c = source.ortho(n);
    }
    let g = GaloisConnection::new(source, target, sharp, cosharp)?;
    if let Some((x, y)) = g.violation() {
        return Err(not_tame(format!(
            "reconstructed maps are not adjoint at ({}, {})",
            g.source.name(x),
            g.target.name(y)
        )));
    }
    Ok(g)
}

/// Every antitone Galois connection `source → target`. Since `r_#` turns
/// joins into meets it is determined by its values on join-irreducibles;
/// each assignment of those is tried and kept when the induced pair is a
/// Galois connection. Fails if there are more than `limit` assignments.
pub fn all_galois_connections(
    source: &Arc<OrthomodularLattice>,
    target: &Arc<OrthomodularLattice>,
    limit: usize,
) -> Result<Vec<GaloisConnection>> {
    let ji = source.join_irreducibles();
    let m = target.len();
    let total = (m as f64).powi(ji.len() as i32);
    if total > limit as f64 {
        return Err(Error::InvalidArgument(format!("{total} candidate connections exceed the limit {limit}")));
    }
    let mut out = Vec::new();
    let mut choice = vec![0usize; ji.len()];
    loop {
        if let Some(g) = induced(source, target, &ji, &choice) {
            out.push(g);
        }
        let mut k = 0;
        loop {
            if k == choice.len() {
                return Ok(out);
            }
            choice[k] += 1;
            if choice[k] < m {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

fn induced(
    source: &Arc<OrthomodularLattice>,
    target: &Arc<OrthomodularLattice>,
    ji: &[usize],
    images: &[usize],
) -> Option<GaloisConnection> {
    let sharp: Vec<usize> = (0..source.len())
        .map(|x| {
            target.meet_all(
                ji.iter()
                    .zip(images)
                    .filter(|(j, _)| source.leq(**j, x))
                    .map(|(_, &v)| v),
            )
        })
        .collect::<Option<_>>()?;
    let cosharp: Vec<usize> = (0..target.len())
        .map(|y| source.join_all((0..source.len()).filter(|&x| target.leq(y, sharp[x]))))
        .collect::<Option<_>>()?;
    let g = GaloisConnection {
        source: source.clone(),
        target: target.clone(),
        sharp,
        cosharp,
    };
    galois_check(&g).then_some(g)
}

/// A uniformly random Galois connection (by enumeration).
pub fn random_galois_connection<R: Rng + ?Sized>(
    rng: &mut R,
    source: &Arc<OrthomodularLattice>,
    target: &Arc<OrthomodularLattice>,
) -> Result<GaloisConnection> {
    let all = all_galois_connections(source, target, 1 << 20)?;
    Ok(all[rng.random_range(0..all.len())].clone())
}
