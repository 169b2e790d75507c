//! Acceptance suite: one line per criterion, nonzero exit on any failure.
//!
//! Run with `cargo test -p tamerel --test acceptance` (add `--release` for
//! the timing figures that matter).

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tamerel::formaldist::{fdist_compose_formula, fdist_dagger_formula, fdist_identity, split, star};
use tamerel::instances::{is_bistochastic, PartialInjection};
use tamerel::io;
use tamerel::omlattice::{
    all_galois_connections, galois_check, galois_compose, galois_dagger, galois_to_tame, validate_oml, Axiom,
    GaloisConnection, OrthomodularLattice,
};
use tamerel::random;
use tamerel::rel::compose;
use tamerel::walk::{self, WalkState};
use tamerel::{dagger_kernel, factor_through_kernel, Carrier, Elem, Error, FinMultiset, Monomial, Prob, Rel, Semiring, Value};

type Outcome = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn ok<T>(r: tamerel::Result<T>, what: &str) -> std::result::Result<T, String> {
    r.map_err(|e| format!("{what}: {e}"))
}

fn eq(a: &Rel, b: &Rel, tol: f64, what: &str) -> std::result::Result<(), String> {
    ensure!(ok(a.approx_eq(b, tol), what)?, "{what} differs");
    Ok(())
}

// ---------------------------------------------------------------- oracles

/// Dense matrix of a relation between finite carriers.
fn dense(r: &Rel) -> Vec<Vec<Value>> {
    let xs = r.dom().elements().unwrap();
    let ys = r.cod().elements().unwrap();
    xs.iter().map(|x| ys.iter().map(|y| r.entry(x, y)).collect()).collect()
}

/// `(a·b)[i][k] = Σ_j a[i][j]·b[j][k]`, first-then order.
fn matmul(s: Semiring, a: &[Vec<Value>], b: &[Vec<Value>], inner: usize) -> Vec<Vec<Value>> {
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|k| (0..inner).fold(s.zero(), |acc, j| acc.add(&row[j].mul(&b[j][k]))))
                .collect()
        })
        .collect()
}

fn dense_eq(a: &[Vec<Value>], b: &[Vec<Value>], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(r, s)| r.len() == s.len() && r.iter().zip(s).all(|(u, v)| u.approx_eq(v, tol)))
}

fn conj_transpose(a: &[Vec<Value>], cols: usize) -> Vec<Vec<Value>> {
    (0..cols).map(|j| a.iter().map(|row| row[j].conj()).collect()).collect()
}

fn c64(z: Complex64) -> Value {
    Value::C64(z)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// -------------------------------------------------------------- criteria

fn dagger_category_laws() -> Outcome {
    let mut g = rng(1);
    for (s, tol) in [(Semiring::Rat, 0.0), (Semiring::C64, 1e-9)] {
        for i in 0..500 {
            let cs: Vec<Carrier> = (0..4).map(|k| random::carrier(&mut g, &format!("c{k}_"), 1, 8)).collect();
            let r = random::relation(&mut g, s, &cs[0], &cs[1], 0.4);
            let q = random::relation(&mut g, s, &cs[1], &cs[2], 0.4);
            let t = random::relation(&mut g, s, &cs[2], &cs[3], 0.4);
            let w = format!("{} triple {i}", s.tag());
            let rq = ok(compose(&r, &q), &w)?;
            let dr = dense(&r);
            ensure!(
                dense_eq(&dense(&rq), &matmul(s, &dr, &dense(&q), dr.first().map_or(0, |x| x.len())), tol),
                "{w}: composite disagrees with the matrix product"
            );
            let lhs = ok(compose(&rq, &t), &w)?;
            let rhs = ok(compose(&r, &ok(compose(&q, &t), &w)?), &w)?;
            eq(&lhs, &rhs, tol, &format!("{w}: associativity"))?;
            let ida = Rel::identity(s, cs[0].clone());
            let idb = Rel::identity(s, cs[1].clone());
            eq(&ok(compose(&ida, &r), &w)?, &r, 0.0, &format!("{w}: left identity"))?;
            eq(&ok(compose(&r, &idb), &w)?, &r, 0.0, &format!("{w}: right identity"))?;
            eq(&rq.dagger(), &ok(compose(&q.dagger(), &r.dagger()), &w)?, tol, &format!("{w}: (q∘r)†"))?;
            eq(&r.dagger().dagger(), &r, 0.0, &format!("{w}: r††"))?;
            eq(&ida.dagger(), &ida, 0.0, &format!("{w}: id†"))?;
            ensure!(
                dense_eq(&dense(&r.dagger()), &conj_transpose(&dr, cs[1].size().unwrap()), 0.0),
                "{w}: dagger is not the conjugate transpose"
            );
        }
    }
    Ok("500 triples each over rat and c64".into())
}

fn biproduct_tensor_suite() -> Outcome {
    let s = Semiring::Rat;
    let mut g = rng(2);
    let car = |g: &mut ChaCha8Rng, p: &str| random::carrier(g, p, 1, 4);
    for i in 0..200 {
        let w = format!("instance {i}");
        let (z, x1, x2) = (car(&mut g, "z"), car(&mut g, "x"), car(&mut g, "y"));
        let r1 = random::relation(&mut g, s, &z, &x1, 0.5);
        let r2 = random::relation(&mut g, s, &z, &x2, 0.5);
        let tup = ok(Rel::tuple(&r1, &r2), &w)?;
        let p1 = ok(Rel::projection(s, 1, x1.clone(), x2.clone()), &w)?;
        let p2 = ok(Rel::projection(s, 2, x1.clone(), x2.clone()), &w)?;
        eq(&ok(compose(&tup, &p1), &w)?, &r1, 0.0, &format!("{w}: π₁∘⟨r₁,r₂⟩"))?;
        eq(&ok(compose(&tup, &p2), &w)?, &r2, 0.0, &format!("{w}: π₂∘⟨r₁,r₂⟩"))?;
        let sum = Carrier::sum(x1.clone(), x2.clone());
        eq(&ok(Rel::tuple(&p1, &p2), &w)?, &Rel::identity(s, sum), 0.0, &format!("{w}: ⟨π₁,π₂⟩"))?;
        for k in 1..=2 {
            let kappa = ok(Rel::coprojection(s, k, x1.clone(), x2.clone()), &w)?;
            let pi = ok(Rel::projection(s, k, x1.clone(), x2.clone()), &w)?;
            eq(&pi, &kappa.dagger(), 0.0, &format!("{w}: π{k} = κ{k}†"))?;
        }
        let cot = ok(Rel::cotuple(&r1.dagger(), &r2.dagger()), &w)?;
        eq(&tup.dagger(), &cot, 0.0, &format!("{w}: ⟨r₁,r₂⟩†"))?;

        // tensor: bifunctoriality, identities, entrywise product
        let (a1, a2, b1, b2) = (car(&mut g, "a"), car(&mut g, "b"), car(&mut g, "c"), car(&mut g, "d"));
        let f1 = random::relation(&mut g, s, &x1, &a1, 0.5);
        let f2 = random::relation(&mut g, s, &x2, &a2, 0.5);
        let h1 = random::relation(&mut g, s, &a1, &b1, 0.5);
        let h2 = random::relation(&mut g, s, &a2, &b2, 0.5);
        let ff = ok(f1.tensor(&f2), &w)?;
        let hh = ok(h1.tensor(&h2), &w)?;
        let lhs = ok(compose(&ff, &hh), &w)?;
        let rhs = ok(ok(compose(&f1, &h1), &w)?.tensor(&ok(compose(&f2, &h2), &w)?), &w)?;
        eq(&lhs, &rhs, 0.0, &format!("{w}: tensor bifunctoriality"))?;
        let idid = ok(Rel::identity(s, x1.clone()).tensor(&Rel::identity(s, x2.clone())), &w)?;
        eq(&idid, &Rel::identity(s, Carrier::pair(x1.clone(), x2.clone())), 0.0, &format!("{w}: id⊗id"))?;
        for u in x1.elements().unwrap() {
            for v in x2.elements().unwrap() {
                for p in a1.elements().unwrap() {
                    for q in a2.elements().unwrap() {
                        let e = ff.entry(&Elem::pair(u.clone(), v.clone()), &Elem::pair(p.clone(), q.clone()));
                        ensure!(e == f1.entry(&u, &p).mul(&f2.entry(&v, &q)), "{w}: tensor entry");
                    }
                }
            }
        }

        // distributivity: natural and unitary
        let (xx, y1, y2) = (car(&mut g, "p"), car(&mut g, "q"), car(&mut g, "r"));
        let (xx2, y12, y22) = (car(&mut g, "s"), car(&mut g, "t"), car(&mut g, "u"));
        let d = Rel::distribute(s, xx.clone(), y1.clone(), y2.clone());
        let d2 = Rel::distribute(s, xx2.clone(), y12.clone(), y22.clone());
        ensure!(ok(d.is_unitary(0.0), &w)?, "{w}: distributor is not unitary");
        let f = random::relation(&mut g, s, &xx, &xx2, 0.5);
        let g1 = random::relation(&mut g, s, &y1, &y12, 0.5);
        let g2 = random::relation(&mut g, s, &y2, &y22, 0.5);
        let lhs = ok(compose(&ok(f.tensor(&ok(g1.oplus(&g2), &w)?), &w)?, &d2), &w)?;
        let rhs = ok(
            compose(&d, &ok(ok(f.tensor(&g1), &w)?.oplus(&ok(f.tensor(&g2), &w)?), &w)?),
            &w,
        )?;
        eq(&lhs, &rhs, 0.0, &format!("{w}: distributor naturality"))?;
    }
    Ok("200 instances per law, exact over rat".into())
}

/// `σ: (X×A)×B → (X×B)×A`.
fn exchange_iso(s: Semiring, x: &Carrier, a: &Carrier, b: &Carrier) -> Rel {
    let f = |u: &Elem| {
        let (xa, bb) = u.as_pair()?;
        let (xx, aa) = xa.as_pair()?;
        Some(Elem::pair(Elem::pair(xx.clone(), bb.clone()), aa.clone()))
    };
    Rel::graph(
        s,
        Carrier::pair(Carrier::pair(x.clone(), a.clone()), b.clone()),
        Carrier::pair(Carrier::pair(x.clone(), b.clone()), a.clone()),
        f,
        f,
    )
}

fn trace_suite() -> Outcome {
    let s = Semiring::Rat;
    let mut g = rng(3);
    let car = |g: &mut ChaCha8Rng, p: &str| random::carrier(g, p, 1, 3);
    let tr = |r: &Rel, w: &str| ok(r.trace(false), w);
    for n in 0..=6 {
        let a = Carrier::numbered("a", n);
        let y = tr(&Rel::gamma_swap(s, a.clone(), a.clone()), "yanking")?;
        eq(&y, &Rel::identity(s, a), 0.0, &format!("yanking at |A| = {n}"))?;
    }
    for i in 0..100 {
        let w = format!("instance {i}");
        let (x, y, a, b) = (car(&mut g, "x"), car(&mut g, "y"), car(&mut g, "a"), car(&mut g, "b"));
        // vanishing I
        let xi = Carrier::pair(x.clone(), Carrier::Unit);
        let yi = Carrier::pair(y.clone(), Carrier::Unit);
        let sv = random::relation(&mut g, s, &xi, &yi, 0.5);
        let via = ok(
            compose(&ok(compose(&Rel::rho_unit(s, x.clone()).dagger(), &sv), &w)?, &Rel::rho_unit(s, y.clone())),
            &w,
        )?;
        eq(&tr(&sv, &w)?, &via, 0.0, &format!("{w}: vanishing I"))?;
        // vanishing II
        let ab = Carrier::pair(a.clone(), b.clone());
        let s2 = random::relation(&mut g, s, &Carrier::pair(x.clone(), ab.clone()), &Carrier::pair(y.clone(), ab), 0.3);
        let ax = Rel::assoc(s, x.clone(), a.clone(), b.clone());
        let ay = Rel::assoc(s, y.clone(), a.clone(), b.clone());
        let s2r = ok(compose(&ok(compose(&ax, &s2), &w)?, &ay.dagger()), &w)?;
        eq(&tr(&s2, &w)?, &tr(&tr(&s2r, &w)?, &w)?, 0.0, &format!("{w}: vanishing II"))?;
        // superposition
        let (wc, zc) = (car(&mut g, "w"), car(&mut g, "z"));
        let t = random::relation(&mut g, s, &wc, &zc, 0.5);
        let sa = random::relation(&mut g, s, &Carrier::pair(x.clone(), a.clone()), &Carrier::pair(y.clone(), a.clone()), 0.4);
        let ts = ok(t.tensor(&sa), &w)?;
        let lhs_in = ok(
            compose(
                &ok(compose(&Rel::assoc(s, wc.clone(), x.clone(), a.clone()), &ts), &w)?,
                &Rel::assoc(s, zc.clone(), y.clone(), a.clone()).dagger(),
            ),
            &w,
        )?;
        eq(&tr(&lhs_in, &w)?, &ok(t.tensor(&tr(&sa, &w)?), &w)?, 0.0, &format!("{w}: superposition"))?;
        // naturality
        let (x0, y0) = (car(&mut g, "m"), car(&mut g, "n"));
        let f = random::relation(&mut g, s, &x0, &x, 0.5);
        let h = random::relation(&mut g, s, &y, &y0, 0.5);
        let ida = Rel::identity(s, a.clone());
        let inner = ok(compose(&ok(compose(&ok(f.tensor(&ida), &w)?, &sa), &w)?, &ok(h.tensor(&ida), &w)?), &w)?;
        let outer = ok(compose(&ok(compose(&f, &tr(&sa, &w)?), &w)?, &h), &w)?;
        eq(&tr(&inner, &w)?, &outer, 0.0, &format!("{w}: naturality"))?;
        // sliding
        let sb = random::relation(&mut g, s, &Carrier::pair(x.clone(), a.clone()), &Carrier::pair(y.clone(), b.clone()), 0.4);
        let hb = random::relation(&mut g, s, &b, &a, 0.5);
        let l = ok(compose(&sb, &ok(Rel::identity(s, y.clone()).tensor(&hb), &w)?), &w)?;
        let r = ok(compose(&ok(Rel::identity(s, x.clone()).tensor(&hb), &w)?, &sb), &w)?;
        eq(&tr(&l, &w)?, &tr(&r, &w)?, 0.0, &format!("{w}: sliding"))?;
        // exchange
        let se = random::relation(
            &mut g,
            s,
            &Carrier::pair(Carrier::pair(x.clone(), a.clone()), b.clone()),
            &Carrier::pair(Carrier::pair(y.clone(), a.clone()), b.clone()),
            0.3,
        );
        let sx = exchange_iso(s, &x, &a, &b);
        let sy = exchange_iso(s, &y, &a, &b);
        let swapped = ok(compose(&ok(compose(&sx.dagger(), &se), &w)?, &sy), &w)?;
        eq(&tr(&tr(&se, &w)?, &w)?, &tr(&tr(&swapped, &w)?, &w)?, 0.0, &format!("{w}: exchange"))?;
        // the normalized variant against its formula
        let norm = ok(sa.trace(true), &w)?;
        let n_a = BigRational::from_integer(BigInt::from(a.size().unwrap()));
        for xe in x.elements().unwrap() {
            for ye in y.elements().unwrap() {
                let mut acc = s.zero();
                for ae in a.elements().unwrap() {
                    acc = acc.add(&sa.entry(&Elem::pair(xe.clone(), ae.clone()), &Elem::pair(ye.clone(), ae.clone())));
                }
                let want = acc.mul(&Value::Rat(n_a.recip()));
                ensure!(norm.entry(&xe, &ye) == want, "{w}: normalized trace formula");
            }
        }
    }
    // documented discrepancy: the normalized variant breaks yanking
    for n in 2..=6 {
        let a = Carrier::numbered("a", n);
        let y = ok(Rel::gamma_swap(s, a.clone(), a.clone()).trace(true), "normalized yanking")?;
        let scaled = ok(Rel::identity(s, a.clone()).scale(&Value::rat(1, n as i64)), "scale")?;
        ensure!(!ok(y.approx_eq(&Rel::identity(s, a), 0.0), "cmp")?, "normalized yanking unexpectedly holds at {n}");
        eq(&y, &scaled, 0.0, "normalized yanking equals id/#A")?;
    }
    ensure!(
        matches!(Rel::identity(Semiring::Int, Carrier::pair(Carrier::Unit, Carrier::numbered("a", 2))).trace(true), Err(Error::DivisionUnavailable(_))),
        "normalized trace over int should be unavailable"
    );
    Ok("yanking |A| ≤ 6; 100 instances per law; normalized variant fails yanking (tr γ = id/#A)".into())
}

fn dagger_mono_equivalence() -> Outcome {
    let mut g = rng(4);
    let (mut yes, mut no) = (0, 0);
    for i in 0..300 {
        let w = format!("relation {i}");
        let a = random::carrier(&mut g, "a", 1, 5);
        let b = random::carrier(&mut g, "b", a.size().unwrap(), 6);
        let (s, tol, mut r) = match i % 3 {
            0 => (Semiring::Rat, 0.0, random::relation(&mut g, Semiring::Rat, &a, &b, 0.5)),
            1 => {
                let f = random::partial_injection(&mut g, &a, &b, 1.0);
                let signs = f.pairs().map(|(x, y)| {
                    let v = if g.random_bool(0.5) { Value::rat(1, 1) } else { Value::rat(-1, 1) };
                    (x.clone(), y.clone(), v)
                });
                let r = Rel::from_entries(Semiring::Rat, a.clone(), b.clone(), signs.collect::<Vec<_>>()).unwrap();
                (Semiring::Rat, 0.0, r)
            }
            _ => {
                let u = random::unitary_c64(&mut g, &b);
                let ys = b.elements().unwrap();
                let entries = a.elements().unwrap().into_iter().zip(&ys).flat_map(|(x, yrow)| {
                    ys.iter()
                        .map(|y| (x.clone(), y.clone(), u.entry(yrow, y)))
                        .filter(|(_, _, v)| !v.is_zero())
                        .collect::<Vec<_>>()
                });
                let r = Rel::from_entries(Semiring::C64, a.clone(), b.clone(), entries.collect::<Vec<_>>()).unwrap();
                (Semiring::C64, 1e-9, r)
            }
        };
        if i % 3 != 0 && g.random_bool(0.3) {
            let extra = random::relation(&mut g, s, &a, &b, 0.2);
            r = ok(r.add(&extra), &w)?;
        }
        let mono = ok(compose(&r, &r.dagger()), &w)?;
        let lhs = ok(mono.approx_eq(&Rel::identity(s, a.clone()), tol), &w)?;
        let d = dense(&r);
        let m = b.size().unwrap();
        let gram = matmul(s, &d, &conj_transpose(&d, m), m);
        let id: Vec<Vec<Value>> = (0..d.len())
            .map(|p| (0..d.len()).map(|q| if p == q { s.one() } else { s.zero() }).collect())
            .collect();
        let rhs = dense_eq(&gram, &id, tol);
        ensure!(lhs == rhs, "{w}: r†∘r = id is {lhs} but orthonormal rows is {rhs}");
        ensure!(ok(r.is_dagger_mono(tol), &w)? == rhs, "{w}: is_dagger_mono disagrees");
        if rhs {
            yes += 1
        } else {
            no += 1
        }
    }
    ensure!(yes > 0 && no > 0, "only one side exercised ({yes} mono, {no} not)");
    Ok(format!("0 disagreements ({yes} dagger monos, {no} non-monos)"))
}

fn kernel_relation(s: Semiring) -> Rel {
    let x = Carrier::numbered("x", 6);
    let y = Carrier::numbered("y", 3);
    let minus = s.one().neg().unwrap();
    let entries: Vec<_> = (0..3)
        .flat_map(|i| {
            [
                (x.at(&format!("x{}", 2 * i)), y.at(&format!("y{i}")), s.one()),
                (x.at(&format!("x{}", 2 * i + 1)), y.at(&format!("y{i}")), minus.clone()),
            ]
        })
        .collect();
    Rel::from_entries(s, x, y, entries).unwrap()
}

fn kernel_reproduction() -> Outcome {
    for (s, tol, h) in [
        (Semiring::QSqrt2, 0.0, Value::qsqrt2((0, 1), (1, 2))),
        (Semiring::F64, 1e-9, Value::F64(std::f64::consts::FRAC_1_SQRT_2)),
    ] {
        let w = s.tag();
        let r = kernel_relation(s);
        let k = ok(dagger_kernel(&r, if tol == 0.0 { 0.0 } else { 1e-12 }), w)?;
        ensure!(k.basis.len() == 3, "{w}: kernel dimension {} instead of 3", k.basis.len());
        ensure!(k.kernel_object.size() == Some(3), "{w}: kernel object has size {:?}", k.kernel_object.size());
        let km = &k.kernel_map;
        let rk = ok(compose(km, &r), w)?;
        ensure!(rk.entries().unwrap().iter().all(|(_, _, v)| v.approx_zero(tol)), "{w}: r∘ker ≠ 0");
        eq(&ok(compose(km, &km.dagger()), w)?, &Rel::identity(s, k.kernel_object.clone()), tol, &format!("{w}: ker†∘ker"))?;
        let x = r.dom();
        for i in 0..3 {
            let phi = FinMultiset::from_pairs(
                s,
                [(x.at(&format!("x{}", 2 * i)), h.clone()), (x.at(&format!("x{}", 2 * i + 1)), h.clone())],
            )
            .unwrap();
            let mut resid = phi.clone();
            for b in &k.basis {
                let c = b.inner(&phi).unwrap();
                resid = resid.sub(&b.scale(&c)).unwrap();
            }
            ensure!(resid.iter().all(|(_, v)| v.approx_zero(tol)), "{w}: φ{i} is not in the span");
        }
    }
    Ok("dimension 3; exact over qsqrt2, within 1e-9 over f64; φᵢ in the span".into())
}

fn rank_oracle(d: &[Vec<Value>], cols: usize) -> usize {
    let rows = d.len();
    if rows == 0 || cols == 0 {
        return 0;
    }
    let m = nalgebra::DMatrix::<Complex64>::from_fn(rows, cols, |i, j| match &d[i][j] {
        Value::C64(z) => *z,
        _ => unreachable!(),
    });
    let sv = m.svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|&&x| x > 1e-9 * top.max(1.0)).count()
}

fn kernel_universality() -> Outcome {
    let mut g = rng(6);
    let s = Semiring::C64;
    let rnd = |g: &mut ChaCha8Rng| c64(Complex64::new(g.random_range(-1.0..1.0), g.random_range(-1.0..1.0)));
    let mut dims = BTreeMap::new();
    for i in 0..200 {
        let w = format!("relation {i}");
        let (nx, ny) = (g.random_range(1..=8), g.random_range(1..=6));
        let x = Carrier::numbered("x", nx);
        let y = Carrier::numbered("y", ny);
        let r = if i % 4 == 0 {
            random::relation(&mut g, s, &x, &y, 0.5)
        } else {
            // rank-deficient product of random factors
            let k = g.random_range(0..=nx.min(ny));
            let a: Vec<Vec<Value>> = (0..nx).map(|_| (0..k).map(|_| rnd(&mut g)).collect()).collect();
            let b: Vec<Vec<Value>> = (0..k).map(|_| (0..ny).map(|_| rnd(&mut g)).collect()).collect();
            let m = if k == 0 { vec![vec![s.zero(); ny]; nx] } else { matmul(s, &a, &b, k) };
            Rel::from_matrix(s, x.clone(), y.clone(), m).unwrap()
        };
        let rank = rank_oracle(&dense(&r), ny);
        let k = ok(dagger_kernel(&r, 1e-10), &w)?;
        let dim = k.kernel_object.size().unwrap();
        ensure!(dim == nx - rank, "{w}: kernel dimension {dim}, expected {} − {rank}", nx);
        *dims.entry(dim).or_insert(0) += 1;
        let km = &k.kernel_map;
        let rk = ok(compose(km, &r), &w)?;
        ensure!(rk.entries().unwrap().iter().all(|(_, _, v)| v.approx_zero(1e-8)), "{w}: r∘ker ≉ 0");
        eq(&ok(compose(km, &km.dagger()), &w)?, &Rel::identity(s, k.kernel_object.clone()), 1e-8, &format!("{w}: ker†∘ker"))?;
        let z = random::carrier(&mut g, "z", 1, 3);
        let m = random::relation(&mut g, s, &z, &k.kernel_object, 0.7);
        let t = ok(compose(&m, km), &w)?;
        let t1 = ok(factor_through_kernel(&k, &t, 1e-8), &w)?;
        let back = dense(&ok(compose(&t1, km), &w)?);
        let resid = back
            .iter()
            .zip(dense(&t))
            .flat_map(|(p, q)| p.iter().zip(q).map(|(u, v)| u.sub(&v).unwrap().magnitude()).collect::<Vec<_>>())
            .fold(0.0, f64::max);
        ensure!(resid <= 1e-8, "{w}: factorization residual {resid:e}");
    }
    Ok(format!("200 relations; kernel dimensions seen {dims:?}"))
}

fn exact_prob(p: &Prob) -> BigRational {
    match p {
        Prob::Exact(q) => q.clone(),
        Prob::Float(x) => panic!("expected an exact probability, got {x}"),
    }
}

fn walk_exactness() -> Outcome {
    let s = Semiring::QISqrt2;
    let one = BigRational::from_integer(BigInt::from(1));
    let h = Value::qisqrt2((0, 1), (1, 2), (0, 1), (0, 1));
    let ih = Value::qisqrt2((0, 1), (0, 1), (0, 1), (1, 2));
    let mixed = FinMultiset::from_pairs(
        s,
        [
            (walk::site(1, 0), Value::qisqrt2((1, 2), (0, 1), (1, 2), (0, 1))),
            (walk::site(2, 5), Value::qisqrt2((1, 2), (0, 1), (-1, 2), (0, 1))),
        ],
    )
    .unwrap();
    let spread = FinMultiset::from_pairs(s, [(walk::site(2, -3), h.clone()), (walk::site(2, 4), ih.clone())]).unwrap();
    let inits = [
        WalkState::basis(s, 1, 0),
        WalkState::basis(s, 2, 0),
        ok(WalkState::symmetric(s), "symmetric")?,
        ok(WalkState::new(mixed, 0.0), "mixed")?,
        ok(WalkState::new(spread, 0.0), "spread")?,
    ];
    for (k, init) in inits.iter().enumerate() {
        for (n, st) in ok(walk::walk_trajectory(init, 25), "walk")?.iter().enumerate() {
            let total = exact_prob(&ok(st.total_probability(), "total")?);
            ensure!(total == one, "initial state {k}: total probability {total} at step {n}");
        }
    }
    let two = ok(walk::walk_run(&WalkState::basis(s, 1, 0), 2), "walk")?;
    let dist: BTreeMap<i64, BigRational> = ok(two.position_distribution(), "dist")?
        .iter()
        .map(|(n, p)| (*n, exact_prob(p)))
        .collect();
    let q = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
    let want = BTreeMap::from([(-2, q(1, 4)), (0, q(1, 2)), (2, q(1, 4))]);
    ensure!(dist == want, "step-2 distribution {dist:?}");
    for (n, st) in ok(walk::walk_trajectory(&inits[2], 25), "walk")?.iter().enumerate() {
        let d = ok(st.position_distribution(), "dist")?;
        for (pos, p) in &d {
            let mirror = d.get(&-pos).map(exact_prob).unwrap_or_default();
            ensure!(exact_prob(p) == mirror, "symmetric walk not mirror symmetric at step {n}, position {pos}");
        }
    }
    // independent float recurrence: L(n−1) ← h(L(n)+R(n)), R(n+1) ← h(L(n)−R(n))
    let hf = std::f64::consts::FRAC_1_SQRT_2;
    let mut amp: BTreeMap<(u8, i64), Complex64> = BTreeMap::from([((1, 0), Complex64::new(1.0, 0.0))]);
    let traj = ok(walk::walk_trajectory(&inits[0], 25), "walk")?;
    for (step, st) in traj.iter().enumerate() {
        let exact = ok(st.position_distribution(), "dist")?;
        let mut float: BTreeMap<i64, f64> = BTreeMap::new();
        for ((_, n), a) in &amp {
            *float.entry(*n).or_default() += a.norm_sqr();
        }
        for (n, p) in &float {
            let e = exact.get(n).map(|p| p.to_f64()).unwrap_or(0.0);
            ensure!((e - p).abs() < 1e-12, "step {step}, position {n}: exact {e} vs recurrence {p}");
        }
        let mut next: BTreeMap<(u8, i64), Complex64> = BTreeMap::new();
        for ((c, n), a) in &amp {
            *next.entry((1, n - 1)).or_default() += a * hf;
            let sign = if *c == 1 { 1.0 } else { -1.0 };
            *next.entry((2, n + 1)).or_default() += a * hf * sign;
        }
        amp = next;
    }
    let q = ok(walk::hadamard_step(s), "step")?;
    let rep = walk::verify_window_unitary(&q, &walk::int_sum_window(-30, 30), 0.0);
    ensure!(rep.passed(), "window unitarity failed: {:?}", rep.failures.first());
    Ok(format!(
        "total = 1 exactly for n ≤ 25 from {} initial states; window [−30, 30]: {} checks verified",
        inits.len(),
        rep.verified
    ))
}

fn bistochastic_extraction() -> Outcome {
    let mut g = rng(8);
    for i in 0..100 {
        let w = format!("unitary {i}");
        let x = random::carrier(&mut g, "e", 1, 8);
        let u = random::unitary_c64(&mut g, &x);
        let p = ok(u.norm_sq_extract(1e-9), &w)?;
        ensure!(ok(is_bistochastic(&p, 1e-9), &w)?, "{w}: extraction is not bistochastic");
        let d = dense(&u);
        let n = d.len();
        for k in 0..n {
            let row: f64 = (0..n).map(|j| d[k][j].norm_sq().magnitude()).sum();
            let col: f64 = (0..n).map(|j| d[j][k].norm_sq().magnitude()).sum();
            ensure!((row - 1.0).abs() <= 1e-9 && (col - 1.0).abs() <= 1e-9, "{w}: sums {row}, {col}");
        }
        let pd = dense(&p);
        for (a, b) in pd.iter().flatten().zip(d.iter().flatten()) {
            ensure!((a.magnitude() - b.norm_sq().magnitude()).abs() <= 1e-12, "{w}: entry is not |u|²");
        }
    }
    Ok("100 unitaries up to 8×8".into())
}

fn pinj_embeddings() -> Outcome {
    let mut g = rng(9);
    let to_rat = |r: &Rel| r.map_values(Semiring::Rat, |v| if v.is_zero() { Value::rat(0, 1) } else { Value::rat(1, 1) });
    for i in 0..300 {
        let w = format!("instance {i}");
        let cs: Vec<Carrier> = (0..4).map(|k| random::carrier(&mut g, &format!("p{k}_"), 0, 6)).collect();
        let f = random::partial_injection(&mut g, &cs[0], &cs[1], 0.7);
        let h = random::partial_injection(&mut g, &cs[1], &cs[2], 0.7);
        let k = random::partial_injection(&mut g, &cs[2], &cs[3], 0.7);
        for p in [&f, &h, &k] {
            ensure!(p.is_mutually_inverse(), "{w}: not mutually inverse");
            ensure!(p.dagger().dagger() == *p, "{w}: dagger not involutive");
        }
        let fh = ok(f.compose(&h), &w)?;
        ensure!(fh.is_mutually_inverse(), "{w}: composite not mutually inverse");
        ensure!(ok(fh.compose(&k), &w)? == ok(f.compose(&ok(h.compose(&k), &w)?), &w)?, "{w}: associativity");
        ensure!(ok(ok(PartialInjection::identity(cs[0].clone()), &w)?.compose(&f), &w)? == f, "{w}: left identity");
        ensure!(ok(f.compose(&ok(PartialInjection::identity(cs[1].clone()), &w)?), &w)? == f, "{w}: right identity");
        ensure!(fh.dagger() == ok(h.dagger().compose(&f.dagger()), &w)?, "{w}: (h∘f)†");
        ensure!(ok(ok(f.compose(&f.dagger()), &w)?.compose(&f), &w)? == f, "{w}: f f† f = f");
        // PInj → BifRel → BifMRel
        eq(&fh.embed(), &ok(compose(&f.embed(), &h.embed()), &w)?, 0.0, &format!("{w}: PInj → BifRel"))?;
        eq(&f.dagger().embed(), &f.embed().dagger(), 0.0, &format!("{w}: embedding and dagger"))?;
        let fr = ok(to_rat(&f.embed()), &w)?;
        let hr = ok(to_rat(&h.embed()), &w)?;
        eq(&ok(to_rat(&fh.embed()), &w)?, &ok(compose(&fr, &hr), &w)?, 0.0, &format!("{w}: BifRel → BifMRel"))?;
        eq(&fh.embed_into(Semiring::Rat), &ok(to_rat(&fh.embed()), &w)?, 0.0, &format!("{w}: direct embedding"))?;
        ensure!(ok(PartialInjection::from_rel(&fh.embed()), &w)? == fh, "{w}: embedding is not faithful");
    }
    Ok("300 instances; laws and both embeddings functorial".into())
}

/// Composite of two tame tables: `(s•r)(x, z) = s(r_*(x), z)` where
/// `r_*(x)⊥` is the least `y` with `r(x, y)`.
fn tame_compose_tables(l: &OrthomodularLattice, r: &[Vec<bool>], s: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = l.len();
    (0..n)
        .map(|x| {
            let least = (0..n)
                .find(|&m| r[x][m] && (0..n).all(|y| r[x][y] == l.leq(m, y)))
                .expect("principal upset");
            s[l.ortho(least)].clone()
        })
        .collect()
}

fn omlatgal() -> Outcome {
    let b3 = OrthomodularLattice::boolean(3);
    let mo2 = OrthomodularLattice::mo2();
    ensure!(validate_oml(&b3).is_valid(), "2³ fails: {}", validate_oml(&b3));
    ensure!(validate_oml(&mo2).is_valid(), "MO2 fails: {}", validate_oml(&mo2));
    let o6 = validate_oml(&OrthomodularLattice::o6());
    let witness = o6
        .failures
        .iter()
        .find(|f| f.axiom == Axiom::Orthomodular)
        .ok_or("O6 passes the orthomodular law")?;
    let mut g = rng(10);
    let mut counts = Vec::new();
    for l in [b3, mo2] {
        let l = Arc::new(l);
        let all = ok(all_galois_connections(&l, &l, 1 << 20), "enumerate")?;
        counts.push(all.len());
        let pick = |g: &mut ChaCha8Rng| -> GaloisConnection { all[g.random_range(0..all.len())].clone() };
        for i in 0..100 {
            let (r, s) = (pick(&mut g), pick(&mut g));
            let w = format!("{} elements, pair {i}", l.len());
            let sr = ok(galois_compose(&r, &s), &w)?;
            ensure!(galois_check(&sr), "{w}: composite is not a Galois connection");
            ensure!(galois_dagger(&galois_dagger(&r)) == r, "{w}: dagger not involutive");
            ensure!(
                galois_dagger(&sr) == ok(galois_compose(&galois_dagger(&s), &galois_dagger(&r)), &w)?,
                "{w}: (s∘r)† ≠ r†∘s†"
            );
            let (tr, ts) = (ok(galois_to_tame(&r), &w)?, ok(galois_to_tame(&s), &w)?);
            ensure!(ok(galois_to_tame(&sr), &w)? == tame_compose_tables(&l, &tr, &ts), "{w}: tame composite");
        }
    }
    Ok(format!(
        "2³ and MO2 valid; O6 fails at ({}); {} and {} connections enumerated",
        witness.witness.join(", "),
        counts[0],
        counts[1]
    ))
}

fn formal_distributions() -> Outcome {
    let s = Semiring::Rat;
    let mut g = rng(11);
    let vars = |g: &mut ChaCha8Rng, p: &str| random::carrier(g, p, 1, 3);
    for i in 0..100 {
        let w = format!("distribution {i}");
        let (x, y, z) = (vars(&mut g, "x"), vars(&mut g, "y"), vars(&mut g, "z"));
        let p = random::formal_distribution(&mut g, s, &x, &y, 3, 8);
        let q = random::formal_distribution(&mut g, s, &y, &z, 3, 8);
        let formula = ok(fdist_compose_formula(&p, &q), &w)?;
        eq(formula.rel(), &ok(compose(p.rel(), q.rel()), &w)?, 0.0, &format!("{w}: composition formula"))?;
        eq(fdist_dagger_formula(&p).rel(), &p.rel().dagger(), 0.0, &format!("{w}: dagger formula"))?;
        let (idx, idy) = (fdist_identity(s, x.clone()), fdist_identity(s, y.clone()));
        let left = ok(fdist_compose_formula(&idx, &p), &w)?;
        let right = ok(fdist_compose_formula(&p, &idy), &w)?;
        let left_rel = ok(compose(idx.rel(), p.rel()), &w)?;
        let right_rel = ok(compose(p.rel(), idy.rel()), &w)?;
        let phis = Monomial::enumerate(&x.elements().unwrap(), 6);
        let psis = Monomial::enumerate(&y.elements().unwrap(), 6);
        for phi in &phis {
            let pe = Elem::Mono(phi.clone());
            for psi in &psis {
                let qe = Elem::Mono(psi.clone());
                let want = p.at(phi, psi);
                ensure!(
                    left.at(phi, psi) == want
                        && right.at(phi, psi) == want
                        && left_rel.entry(&pe, &qe) == want
                        && right_rel.entry(&pe, &qe) == want,
                    "{w}: identity law at ({phi}, {psi})"
                );
            }
        }
    }
    // star/split on 2 + 2 variables, all degrees ≤ 10
    let x = Carrier::numbered("x", 2);
    let y = Carrier::numbered("y", 2);
    let sum_vars: Vec<Elem> = x
        .elements()
        .unwrap()
        .into_iter()
        .map(Elem::left)
        .chain(y.elements().unwrap().into_iter().map(Elem::right))
        .collect();
    let all = Monomial::enumerate(&sum_vars, 10);
    for chi in &all {
        let (phi, psi) = split(chi).ok_or("split failed")?;
        ensure!(star(&phi, &psi) == *chi, "star∘split ≠ id at {chi}");
    }
    let (xs, ys) = (Monomial::enumerate(&x.elements().unwrap(), 10), Monomial::enumerate(&y.elements().unwrap(), 10));
    let mut images = std::collections::BTreeSet::new();
    for phi in &xs {
        for psi in ys.iter().filter(|psi| phi.degree() + psi.degree() <= 10) {
            let chi = star(phi, psi);
            ensure!(split(&chi) == Some((phi.clone(), psi.clone())), "split∘star ≠ id at ({phi}, {psi})");
            images.insert(chi);
        }
    }
    ensure!(images.len() == all.len(), "star is not onto: {} of {}", images.len(), all.len());
    Ok(format!("100 random pairs exact over rat; star/split bijective on {} monomials", all.len()))
}

fn io_round_trip() -> Outcome {
    let mut g = rng(12);
    for s in Semiring::ALL {
        for i in 0..100 {
            let w = format!("{} relation {i}", s.tag());
            let a = random::carrier(&mut g, "a", 0, 3);
            let b = random::carrier(&mut g, "b", 0, 3);
            let (dom, cod) = match i % 3 {
                0 => (a, b),
                1 => (Carrier::sum(a, Carrier::Unit), Carrier::pair(b, Carrier::numbered("c", 2))),
                _ => (Carrier::pair(Carrier::sum(a, b.clone()), Carrier::Unit), Carrier::sum(b, Carrier::Empty)),
            };
            let r = random::relation(&mut g, s, &dom, &cod, 0.5);
            let text = ok(io::write_relation(&r), &w)?;
            let back = ok(io::read_relation(&text), &w)?;
            eq(&back, &r, 0.0, &format!("{w}: round trip"))?;
            ensure!(ok(io::write_relation(&back), &w)? == text, "{w}: re-serialization is not byte-identical");
        }
    }
    let head = r#""format":"tamerel-v1","semiring":"rat","dom":{"finite":["a","b"]},"cod":"int_line""#;
    let malformed = [
        "".to_string(),
        "{".to_string(),
        "[]".to_string(),
        format!("{{{head}}}"),
        format!(r#"{{{head},"entries":[["a","1","1/2"],["a","1","1/3"]]}}"#),
        format!(r#"{{{head},"entries":[["a","1","0"]]}}"#),
        format!(r#"{{{head},"entries":[["b","1","1"],["a","1","1"]]}}"#),
        format!(r#"{{{head},"entries":[["c","1","1"]]}}"#),
        format!(r#"{{{head},"entries":[["a","x","1"]]}}"#),
        format!(r#"{{{head},"entries":[["a","1","1/0"]]}}"#),
        format!(r#"{{{head},"entries":[["a","1",0.5]]}}"#),
        format!(r#"{{{head},"entries":[["a","1"]]}}"#),
        format!(r#"{{{head},"entries":[["a","1","1"]],"builtin":"hadamard_walk"}}"#),
        r#"{"format":"tamerel-v2","semiring":"rat","dom":"unit","cod":"unit","entries":[]}"#.to_string(),
        r#"{"format":"tamerel-v1","semiring":"reals","dom":"unit","cod":"unit","entries":[]}"#.to_string(),
        r#"{"format":"tamerel-v1","semiring":"rat","dom":{"cube":3},"cod":"unit","entries":[]}"#.to_string(),
    ];
    for (i, doc) in malformed.iter().enumerate() {
        match io::read_relation(doc) {
            Err(Error::Parse { .. }) => {}
            Err(e) => return Err(format!("malformed document {i} gave {e} instead of a parse error")),
            Ok(_) => return Err(format!("malformed document {i} was accepted")),
        }
    }
    Ok(format!("100 relations per semiring byte-identical; {} malformed documents rejected", malformed.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Option<Duration>); 12] = [
        ("dagger-category laws", dagger_category_laws, Some(Duration::from_secs(10))),
        ("biproducts and tensor", biproduct_tensor_suite, None),
        ("trace", trace_suite, None),
        ("dagger-mono equivalence", dagger_mono_equivalence, None),
        ("kernel example", kernel_reproduction, None),
        ("kernel universality", kernel_universality, Some(Duration::from_secs(20))),
        ("walk exactness", walk_exactness, Some(Duration::from_secs(5))),
        ("bistochastic extraction", bistochastic_extraction, None),
        ("partial injections and embeddings", pinj_embeddings, None),
        ("orthomodular lattices and Galois connections", omlatgal, None),
        ("formal distributions", formal_distributions, None),
        ("serialization", io_round_trip, None),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(l)) if took > *l => Err(format!("took {took:.2?}, limit {l:?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("[PASS] criterion {}: {name} — {detail} ({took:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("[FAIL] criterion {}: {name} — {why} ({took:.2?})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
