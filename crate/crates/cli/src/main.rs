use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tamerel::formaldist::{fdist_compose_formula, fdist_dagger_formula, phat_apply, TameFormalDist};
use tamerel::instances::is_bistochastic;
use tamerel::io;
use tamerel::omlattice::{galois_check, galois_compose, galois_dagger, validate_oml};
use tamerel::rel::{compose, hom_add};
use tamerel::walk::{self, WalkState};
use tamerel::{dagger_kernel, factor_through_kernel, Carrier, ClassifyOptions, Elem, Error, KernelResult, Rel, Semiring};

const CHECK_TOL: f64 = 1e-9;
const KERNEL_TOL: f64 = 1e-10;

/// Bifinite multirelations: composition, dagger, kernels, checks, the
/// Hadamard walk, formal distributions and orthomodular-lattice connections.
///
/// Relations are read and written as `tamerel-v1` JSON; `-` as an output
/// path writes to standard output. Exit status: 0 success (or check true),
/// 1 check false, 2 usage or data error.
#[derive(Parser)]
#[command(name = "tamerel", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// `B∘A`: first A, then B.
    Compose {
        a: PathBuf,
        b: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Conjugate transpose.
    Dagger {
        a: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// `A ⊗ B` on pair carriers.
    Tensor {
        a: PathBuf,
        b: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// `A ⊕ B` on sum carriers.
    Oplus {
        a: PathBuf,
        b: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Entrywise sum of two parallel relations.
    Add {
        a: PathBuf,
        b: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Decide a property; exit 1 when it fails.
    Check {
        property: Property,
        a: PathBuf,
        /// Float tolerance (default 1e-9; ignored for exact semirings).
        #[arg(long)]
        tol: Option<f64>,
        /// Finite window `LO:HI` for relations on infinite integer carriers.
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: Option<(i64, i64)>,
    },
    /// Dagger kernel `k: K → X` of a relation `X → Y` over a field.
    Kernel {
        a: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        /// Rank-decision tolerance (default 1e-10; ignored for exact semirings).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Factor `T: Z → X` through a kernel map `KER: K → X`, giving `Z → K`.
    Factor {
        ker: PathBuf,
        t: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Run the Hadamard walk and write its position distribution as CSV.
    Walk {
        #[arg(long)]
        steps: usize,
        /// Initial state (a relation out of `unit`); default `1·κ₁(0)`.
        #[arg(long)]
        init: Option<PathBuf>,
        #[arg(long, value_enum)]
        semiring: Option<WalkSemiring>,
        #[arg(long)]
        out: PathBuf,
        /// Write every step `0..=N`, not only the last.
        #[arg(long)]
        all_steps: bool,
        /// Keep the coin branch instead of marginalizing it.
        #[arg(long)]
        joint: bool,
    },
    /// Tame formal distributions.
    #[command(subcommand)]
    Fdist(FdistCommand),
    /// Orthomodular lattices and Galois connections.
    #[command(subcommand)]
    Oml(OmlCommand),
}

#[derive(Subcommand)]
enum FdistCommand {
    /// Coefficient-formula composite `Q∘P`.
    Compose {
        p: PathBuf,
        q: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    Dagger {
        p: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// `p̂(q)` for a polynomial state `Q` over the codomain monomials.
    Apply {
        p: PathBuf,
        q: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum OmlCommand {
    /// Check the orthomodular-lattice axioms; exit 1 on failure.
    Validate { lattice: PathBuf },
    /// Composite `(S∘R)_# = S_#∘⊥∘R_#`.
    Compose {
        r: PathBuf,
        s: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Swap the two maps.
    Dagger {
        r: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Check the Galois condition; exit 1 on failure.
    Check { r: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Property {
    Unitary,
    DaggerMono,
    DaggerEpi,
    SelfAdjoint,
    Projection,
    Bistochastic,
    Coherent,
}

#[derive(Clone, Copy, ValueEnum)]
enum WalkSemiring {
    Qisqrt2,
    C64,
}

impl From<WalkSemiring> for Semiring {
    fn from(w: WalkSemiring) -> Semiring {
        match w {
            WalkSemiring::Qisqrt2 => Semiring::QISqrt2,
            WalkSemiring::C64 => Semiring::C64,
        }
    }
}

fn parse_window(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected LO:HI")?;
    let lo: i64 = lo.trim().parse().map_err(|e| format!("bad LO: {e}"))?;
    let hi: i64 = hi.trim().parse().map_err(|e| format!("bad HI: {e}"))?;
    if lo > hi {
        return Err("LO exceeds HI".into());
    }
    Ok((lo, hi))
}

/// Failure with a message for standard error.
struct Fail(String);

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        Fail(e.to_string())
    }
}

type Res<T> = Result<T, Fail>;

enum Outcome {
    Done,
    False,
}

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| Fail(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Res<()> {
    if path == Path::new("-") {
        print!("{text}");
        return Ok(());
    }
    fs::write(path, text).map_err(|e| Fail(format!("{}: {e}", path.display())))
}

fn in_file<T>(path: &Path, r: tamerel::Result<T>) -> Res<T> {
    r.map_err(|e| Fail(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Res<Rel> {
    in_file(path, io::read_relation(&read(path)?))
}

fn load_fdist(path: &Path) -> Res<TameFormalDist> {
    in_file(path, TameFormalDist::new(load(path)?))
}

fn save(path: &Path, r: &Rel) -> Res<()> {
    write(path, &io::write_relation(r)?)
}

/// Exact semirings decide everything exactly; a tolerance flag is noted and
/// dropped.
fn effective_tol(s: Semiring, given: Option<f64>, default: f64) -> f64 {
    if s.is_float() {
        given.unwrap_or(default)
    } else {
        if given.is_some() {
            eprintln!("note: semiring {s} is exact; --tol is ignored");
        }
        0.0
    }
}

/// Window elements for an integer-line carrier or a sum of them.
fn window_elems(c: &Carrier, (lo, hi): (i64, i64)) -> Res<Vec<Elem>> {
    match c {
        Carrier::IntLine => Ok((lo..=hi).map(Elem::Int).collect()),
        Carrier::Sum(a, b) if **a == Carrier::IntLine && **b == Carrier::IntLine => Ok(walk::int_sum_window(lo, hi)),
        _ => Err(Fail(format!("--window needs an integer carrier, not {c}"))),
    }
}

fn check(property: Property, path: &Path, tol: Option<f64>, window: Option<(i64, i64)>) -> Res<Outcome> {
    let r = load(path)?;
    let tol = effective_tol(r.semiring(), tol, CHECK_TOL);
    let elems = match window {
        Some(w) => Some(window_elems(r.dom(), w)?),
        None => None,
    };
    let (name, ok, note) = match property {
        Property::Coherent => {
            let report = r.check_coherent(elems.as_deref().unwrap_or(&[]), tol);
            for (x, y, a, b) in &report.violations {
                eprintln!("row({x:?})({y:?}) = {a} but col({y:?})({x:?}) = {b}");
            }
            ("coherent", report.is_coherent(), format!(" ({} entries checked)", report.checked))
        }
        Property::Bistochastic => ("bistochastic", is_bistochastic(&r, tol)?, String::new()),
        _ => {
            let c = r.classify(&ClassifyOptions { tol, window: elems })?;
            let (name, v) = match property {
                Property::Unitary => ("unitary", Some(c.unitary)),
                Property::DaggerMono => ("dagger-mono", Some(c.dagger_mono)),
                Property::DaggerEpi => ("dagger-epi", Some(c.dagger_epi)),
                Property::SelfAdjoint => ("self-adjoint", c.self_adjoint),
                Property::Projection => ("projection", c.projection),
                _ => unreachable!(),
            };
            let v = v.ok_or(Error::NonSquare)?;
            let note = match (c.partial, window) {
                (true, Some((lo, hi))) => format!(" (on window {lo}:{hi} only)"),
                _ => String::new(),
            };
            (name, v, note)
        }
    };
    println!("{name}: {ok}{note}");
    Ok(if ok { Outcome::Done } else { Outcome::False })
}

fn kernel(path: &Path, out: &Path, tol: Option<f64>) -> Res<Outcome> {
    let r = load(path)?;
    let tol = effective_tol(r.semiring(), tol, KERNEL_TOL);
    let k = match dagger_kernel(&r, tol) {
        Ok(k) => k,
        Err(Error::NormalizationFailed(k)) => {
            eprintln!(
                "warning: {} has no square root for some basis norm; kernel basis is orthogonal, not orthonormal",
                r.semiring()
            );
            *k
        }
        Err(e) => return Err(Fail(format!("{}: {e}", path.display()))),
    };
    save(out, &k.kernel_map)?;
    if out != Path::new("-") {
        println!(
            "kernel: {} elements, {} adjoined basis vectors",
            k.kernel_object.size().unwrap_or(0),
            k.basis.len()
        );
    }
    Ok(Outcome::Done)
}

fn factor(ker: &Path, t: &Path, out: &Path, tol: Option<f64>) -> Res<Outcome> {
    let kmap = load(ker)?;
    let tol = effective_tol(kmap.semiring(), tol, CHECK_TOL);
    let k = in_file(ker, KernelResult::from_kernel_map(&kmap, tol))?;
    save(out, &factor_through_kernel(&k, &load(t)?, tol)?)?;
    Ok(Outcome::Done)
}

fn walk_cmd(
    steps: usize,
    init: Option<&Path>,
    semiring: Option<WalkSemiring>,
    out: &Path,
    all_steps: bool,
    joint: bool,
) -> Res<Outcome> {
    let init = match init {
        None => WalkState::basis(semiring.map(Semiring::from).unwrap_or(Semiring::QISqrt2), 1, 0),
        Some(p) => {
            let (cod, amps) = in_file(p, io::read_state(&read(p)?))?;
            if cod != walk::walk_carrier() {
                return Err(Fail(format!("{}: initial state must live on int + int, not {cod}", p.display())));
            }
            if let Some(s) = semiring.map(Semiring::from) {
                if s != amps.semiring() {
                    return Err(Fail(format!("{}: state is over {}, not {s}", p.display(), amps.semiring())));
                }
            }
            let tol = if amps.semiring().is_float() { CHECK_TOL } else { 0.0 };
            in_file(p, WalkState::new(amps, tol))?
        }
    };
    let states: Vec<(usize, WalkState)> = if all_steps {
        walk::walk_trajectory(&init, steps)?.into_iter().enumerate().collect()
    } else {
        vec![(steps, walk::walk_run(&init, steps)?)]
    };
    let mut rows = Vec::new();
    for (n, st) in states {
        rows.extend(st.distribution(!joint)?.into_iter().map(|(b, x, p)| (n, b, x, p)));
    }
    write(out, &io::write_distribution_csv(&rows, joint))?;
    Ok(Outcome::Done)
}

fn fdist(cmd: FdistCommand) -> Res<Outcome> {
    match cmd {
        FdistCommand::Compose { p, q, out } => {
            let r = fdist_compose_formula(&load_fdist(&p)?, &load_fdist(&q)?)?;
            save(&out, r.rel())?;
        }
        FdistCommand::Dagger { p, out } => save(&out, fdist_dagger_formula(&load_fdist(&p)?).rel())?,
        FdistCommand::Apply { p, q, out } => {
            let pd = load_fdist(&p)?;
            let (cod, poly) = in_file(&q, io::read_state(&read(&q)?))?;
            if &cod != pd.rel().cod() {
                return Err(Fail(format!("{}: polynomial lives on {cod}, not {}", q.display(), pd.rel().cod())));
            }
            write(&out, &io::write_state(pd.rel().dom(), &phat_apply(&pd, &poly)?)?)?;
        }
    }
    Ok(Outcome::Done)
}

fn oml(cmd: OmlCommand) -> Res<Outcome> {
    let conn = |p: &Path| -> Res<_> { in_file(p, io::read_connection(&read(p)?)) };
    match cmd {
        OmlCommand::Validate { lattice } => {
            let l = in_file(&lattice, io::read_lattice(&read(&lattice)?))?;
            let report = validate_oml(&l);
            print!("{report}");
            return Ok(if report.is_valid() { Outcome::Done } else { Outcome::False });
        }
        OmlCommand::Compose { r, s, out } => write(&out, &io::write_connection(&galois_compose(&conn(&r)?, &conn(&s)?)?))?,
        OmlCommand::Dagger { r, out } => write(&out, &io::write_connection(&galois_dagger(&conn(&r)?)))?,
        OmlCommand::Check { r } => {
            let g = conn(&r)?;
            let ok = galois_check(&g);
            match g.violation() {
                Some((x, y)) => println!(
                    "galois: false (x = {}, y = {}: x ≤ y_# but not y ≤ x^#)",
                    g.source.name(x),
                    g.target.name(y)
                ),
                None => println!("galois: {ok}"),
            }
            return Ok(if ok { Outcome::Done } else { Outcome::False });
        }
    }
    Ok(Outcome::Done)
}

fn binary(a: &Path, b: &Path, out: &Path, f: impl Fn(&Rel, &Rel) -> tamerel::Result<Rel>) -> Res<Outcome> {
    save(out, &f(&load(a)?, &load(b)?)?)?;
    Ok(Outcome::Done)
}

fn dispatch(cmd: Command) -> Res<Outcome> {
    match cmd {
        Command::Compose { a, b, out } => binary(&a, &b, &out, compose),
        Command::Tensor { a, b, out } => binary(&a, &b, &out, |x, y| x.tensor(y)),
        Command::Oplus { a, b, out } => binary(&a, &b, &out, |x, y| x.oplus(y)),
        Command::Add { a, b, out } => binary(&a, &b, &out, hom_add),
        Command::Dagger { a, out } => {
            save(&out, &load(&a)?.dagger())?;
            Ok(Outcome::Done)
        }
        Command::Check { property, a, tol, window } => check(property, &a, tol, window),
        Command::Kernel { a, out, tol } => kernel(&a, &out, tol),
        Command::Factor { ker, t, out, tol } => factor(&ker, &t, &out, tol),
        Command::Walk { steps, init, semiring, out, all_steps, joint } => {
            walk_cmd(steps, init.as_deref(), semiring, &out, all_steps, joint)
        }
        Command::Fdist(c) => fdist(c),
        Command::Oml(c) => oml(c),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::False) => ExitCode::from(1),
        Err(Fail(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
