//! Command-line entry point: compute cocycle components, run the
//! verification suites, probe the Hopf algebra, and extract tensors.
//!
//! JSON is the canonical output and is byte-identical for a fixed seed
//! and configuration; wall-clock timing goes to stderr only.  Exit codes:
//! 0 all checks pass, 1 a check failed (the report carries the witness),
//! 2 invalid configuration or input.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chern::{
    antisym_polarization, antisym_trace, chern_class_product, chern_cocycle, is_gl_basic,
    simplicial_curvature, Mode,
};
use crate::cochain::{chern_cochain, total_closedness, BidegreeReport, ClosednessMode};
use crate::cyclic::{
    eq_mod_null, gl_invariance_check, is_null_tensor, random_cyclic_tensor, rel_b, rel_big_b,
    rel_tau, CyclicTensor,
};
use crate::error::CoreError;
use crate::extract::{
    extract_hopf_tensor, infer_ratio, jet_template, phi_integrand_check, phi_samples,
};
use crate::form::{BiForm, Gen};
use crate::hopf::oracle::{operators_equal, random_crossed};
use crate::hopf::{
    act_gen, act_word, coproduct, degree_one_generators, mul_monomials, s_delta, word_to_string,
    CrossedElement, CrossedMonomial, HGen, HopfElement, Word,
};
use crate::jet::{DiffeoJson, JetDiffeo};
use crate::poly::{rat_int, Poly, Rational, Var};

const EXIT_OK: i32 = 0;
const EXIT_CHECK: i32 = 1;
const EXIT_USAGE: i32 = 2;

#[derive(Parser)]
#[command(
    name = "hopfchern",
    version,
    about = "Equivariant Chern group cocycles of Diff(R^n) and their Hopf cyclic tensors"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a Chern cocycle component on a tuple of jet diffeomorphisms
    Chern(ChernArgs),
    /// Verification suites for the group cochain complex
    Verify {
        #[command(subcommand)]
        cmd: VerifyCmd,
    },
    /// Hopf algebra probes and identity suites
    Hopf {
        #[command(subcommand)]
        cmd: HopfCmd,
    },
    /// Cyclic complex identity suites
    Cyclic {
        #[command(subcommand)]
        cmd: CyclicCmd,
    },
    /// Extract the Hopf cyclic Chern tensor of a class
    Extract(ExtractArgs),
    /// Run the bundled verification suite for one dimension
    Suite(SuiteArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum CliMode {
    Base,
    Frame,
}

impl From<CliMode> for Mode {
    fn from(m: CliMode) -> Mode {
        match m {
            CliMode::Base => Mode::Base,
            CliMode::Frame => Mode::Frame,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFmt {
    Json,
    Latex,
}

#[derive(Args)]
struct ChernArgs {
    /// Dimension n
    #[arg(long)]
    n: u8,
    /// Chern class J, e.g. "1", "2", "1,1" (a leading "c" is allowed)
    #[arg(long)]
    class: String,
    /// Simplicial level p; the tuple file must hold p+1 diffeomorphisms
    #[arg(long)]
    level: u8,
    /// JSON file with the homogeneous tuple of diffeomorphisms
    #[arg(long)]
    tuple: PathBuf,
    #[arg(long, value_enum, default_value = "base")]
    mode: CliMode,
    #[arg(long, value_enum, default_value = "json")]
    out: OutFmt,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Total (delta-bar, d)-closedness of the cocycle components
    Cocycle(CocycleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyMode {
    Symbolic,
    Randomized,
}

#[derive(Args)]
struct CocycleArgs {
    #[arg(long)]
    n: u8,
    #[arg(long)]
    class: String,
    #[arg(long, value_enum, default_value = "symbolic")]
    mode: VerifyMode,
    /// Random evaluation points per identity (randomized mode)
    #[arg(long, default_value_t = 20)]
    points: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Jet order of the generic symbols (symbolic mode)
    #[arg(long, default_value_t = 3)]
    order: u8,
}

#[derive(Subcommand)]
enum HopfCmd {
    /// Print the coproduct of a generator obtained by Leibniz probing
    Probe {
        /// Generator: Xk, Yij, or Dijk followed by higher-order indices
        #[arg(long)]
        gen: String,
        #[arg(long, default_value_t = 2)]
        n: u8,
    },
    /// Identity suites on the Hopf algebra
    Verify {
        #[arg(long, value_enum)]
        suite: HopfSuite,
        #[arg(long, default_value_t = 2)]
        n: u8,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum HopfSuite {
    /// S_delta^2 = Id on generators and random products
    Sdelta,
    /// The structure identities as operator identities
    Structure,
    /// Coproducts reproduce the Leibniz rule on random monomials
    Leibniz,
}

#[derive(Subcommand)]
enum CyclicCmd {
    /// Identity suites on the relative cyclic complex
    Verify {
        #[arg(long, value_enum)]
        suite: CyclicSuite,
        #[arg(long, default_value_t = 1)]
        q: usize,
        #[arg(long, default_value_t = 1)]
        n: u8,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CyclicSuite {
    /// tau^{q+1} = Id
    Tau,
    /// b^2 = 0, B^2 = 0, bB + Bb = 0
    #[value(name = "bB", alias = "bb")]
    Bb,
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long)]
    n: u8,
    /// Chern class J, e.g. "c1" or "1,1"
    #[arg(long)]
    class: String,
    /// Simplicial level p of the component; defaults to |J|
    #[arg(long)]
    level: Option<u8>,
    /// Also write the tensor JSON to this path
    #[arg(long)]
    emit: Option<PathBuf>,
}

#[derive(Args)]
struct SuiteArgs {
    #[arg(long)]
    n: u8,
    /// Include the slower checks
    #[arg(long)]
    all: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Run the CLI on the given argument list (argv[0] included) and return
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("hopfchern: {}", e);
            match e {
                CoreError::Parse(_)
                | CoreError::InvalidClass(_)
                | CoreError::DimensionMismatch(_)
                | CoreError::Unsupported(_)
                | CoreError::Io(_)
                | CoreError::Json(_) => EXIT_USAGE,
                _ => EXIT_CHECK,
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, CoreError> {
    match cli.cmd {
        Cmd::Chern(a) => cmd_chern(a),
        Cmd::Verify { cmd: VerifyCmd::Cocycle(a) } => cmd_verify_cocycle(a),
        Cmd::Hopf { cmd } => match cmd {
            HopfCmd::Probe { gen, n } => cmd_hopf_probe(&gen, n),
            HopfCmd::Verify { suite, n, samples, seed } => cmd_hopf_verify(suite, n, samples, seed),
        },
        Cmd::Cyclic { cmd } => match cmd {
            CyclicCmd::Verify { suite, q, n, samples, seed } => {
                cmd_cyclic_verify(suite, q, n, samples, seed)
            }
        },
        Cmd::Extract(a) => cmd_extract(a),
        Cmd::Suite(a) => cmd_suite(a),
    }
}

fn emit<T: Serialize>(report: &T) -> Result<(), CoreError> {
    println!("{}", serde_json::to_string_pretty(report)?);
    Ok(())
}

/// Size of the work pool from HOPFCHERN_JOBS (recorded in reports; the
/// current executor is sequential, so any value behaves like 1).
fn jobs() -> usize {
    std::env::var("HOPFCHERN_JOBS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&j| j >= 1)
        .unwrap_or(1)
}

fn parse_class(s: &str) -> Result<Vec<u8>, CoreError> {
    let t = s.trim().to_ascii_lowercase();
    let body = t.strip_prefix('c').unwrap_or(&t);
    let parts: Vec<u8> = body
        .split([',', 'c', ' '])
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse::<u8>()
                .map_err(|_| CoreError::Parse(format!("bad class part `{}` in `{}`", p, s)))
        })
        .collect::<Result<_, _>>()?;
    if parts.is_empty() || parts.iter().any(|&q| q == 0) {
        return Err(CoreError::Parse(format!("bad class `{}`", s)));
    }
    Ok(parts)
}

fn class_string(j: &[u8]) -> String {
    format!(
        "c{}",
        j.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(",c")
    )
}

fn parse_gen(s: &str) -> Result<HGen, CoreError> {
    let t = s.trim();
    let mut chars = t.chars();
    let head = chars
        .next()
        .ok_or_else(|| CoreError::Parse("empty generator".into()))?;
    let digits: Vec<u8> = chars
        .map(|c| {
            c.to_digit(10)
                .map(|d| d as u8)
                .ok_or_else(|| CoreError::Parse(format!("bad generator `{}`", s)))
        })
        .collect::<Result<_, _>>()?;
    match (head.to_ascii_uppercase(), digits.len()) {
        ('X', 1) => Ok(HGen::X(digits[0])),
        ('Y', 2) => Ok(HGen::Y(digits[0], digits[1])),
        ('D', l) if l >= 3 => Ok(HGen::delta(digits[0], digits[1], digits[2], &digits[3..])),
        _ => Err(CoreError::Parse(format!(
            "bad generator `{}` (expected Xk, Yij, or Dijk...)",
            s
        ))),
    }
}

fn latex_gen(g: &Gen) -> String {
    match g {
        Gen::Dt(r) => format!("dt_{{{}}}", r),
        Gen::Dx(k) => format!("dx^{{{}}}", k),
        Gen::Dy(i, j) => format!("dy^{{{}}}_{{{}}}", i, j),
    }
}

fn latex_form(f: &BiForm) -> String {
    let mut parts = Vec::new();
    for (gens, c) in f.terms() {
        let word = gens.iter().map(latex_gen).collect::<Vec<_>>().join(" \\wedge ");
        if word.is_empty() {
            parts.push(format!("\\left({}\\right)", c));
        } else {
            parts.push(format!("\\left({}\\right)\\, {}", c, word));
        }
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    }
}

// --- chern ------------------------------------------------------------------

#[derive(Serialize)]
struct ChernReport {
    n: u8,
    class: String,
    level: u8,
    mode: String,
    jobs: usize,
    form: String,
    terms: Vec<FormTermJson>,
}

#[derive(Serialize)]
struct FormTermJson {
    generators: Vec<String>,
    coefficient: String,
}

fn form_terms_json(f: &BiForm) -> Vec<FormTermJson> {
    f.terms()
        .map(|(gens, c)| FormTermJson {
            generators: gens.iter().map(|g| g.to_string()).collect(),
            coefficient: c.to_string(),
        })
        .collect()
}

fn cmd_chern(a: ChernArgs) -> Result<i32, CoreError> {
    let j = parse_class(&a.class)?;
    let text = fs::read_to_string(&a.tuple)?;
    let jsons: Vec<DiffeoJson> = serde_json::from_str(&text)?;
    if jsons.len() != a.level as usize + 1 {
        return Err(CoreError::DimensionMismatch(format!(
            "level {} needs {} diffeomorphisms, the file holds {}",
            a.level,
            a.level + 1,
            jsons.len()
        )));
    }
    let tuple: Vec<JetDiffeo> = jsons
        .iter()
        .enumerate()
        .map(|(i, d)| {
            if d.n != a.n {
                return Err(CoreError::DimensionMismatch(format!(
                    "entry {} has n = {}, expected {}",
                    i, d.n, a.n
                )));
            }
            JetDiffeo::from_json(d, &format!("tuple{}", i))
        })
        .collect::<Result<_, _>>()?;
    let form = chern_cocycle(&j, &tuple, a.mode.into())?;
    match a.out {
        OutFmt::Json => {
            let report = ChernReport {
                n: a.n,
                class: class_string(&j),
                level: a.level,
                mode: match a.mode {
                    CliMode::Base => "base".into(),
                    CliMode::Frame => "frame".into(),
                },
                jobs: jobs(),
                form: form.to_string(),
                terms: form_terms_json(&form),
            };
            emit(&report)?;
        }
        OutFmt::Latex => println!("{}", latex_form(&form)),
    }
    Ok(EXIT_OK)
}

// --- verify cocycle ---------------------------------------------------------

#[derive(Serialize)]
struct CocycleReport {
    n: u8,
    class: String,
    mode: String,
    seed: u64,
    points: usize,
    order: u8,
    jobs: usize,
    bidegrees: Vec<BidegreeReport>,
    ok: bool,
}

fn cmd_verify_cocycle(a: CocycleArgs) -> Result<i32, CoreError> {
    let j = parse_class(&a.class)?;
    let mode = match a.mode {
        VerifyMode::Symbolic => ClosednessMode::Symbolic { order: a.order },
        VerifyMode::Randomized => ClosednessMode::Randomized {
            points: a.points,
            seed: a.seed,
        },
    };
    let bidegrees = total_closedness(a.n, &j, mode)?;
    let ok = bidegrees.iter().all(|r| r.ok);
    let report = CocycleReport {
        n: a.n,
        class: class_string(&j),
        mode: match a.mode {
            VerifyMode::Symbolic => "symbolic".into(),
            VerifyMode::Randomized => "randomized".into(),
        },
        seed: a.seed,
        points: a.points,
        order: a.order,
        jobs: jobs(),
        bidegrees,
        ok,
    };
    emit(&report)?;
    Ok(if ok { EXIT_OK } else { EXIT_CHECK })
}

// --- hopf -------------------------------------------------------------------

#[derive(Serialize)]
struct ProbeReport {
    n: u8,
    generator: String,
    coproduct: String,
    terms: Vec<CoproductTermJson>,
}

#[derive(Serialize)]
struct CoproductTermJson {
    left: String,
    right: String,
    coefficient: String,
}

fn cmd_hopf_probe(gen: &str, n: u8) -> Result<i32, CoreError> {
    let g = parse_gen(gen)?;
    let cop = coproduct(n, &g)?;
    let terms = cop
        .terms()
        .iter()
        .map(|((w1, w2), c)| CoproductTermJson {
            left: word_to_string(w1),
            right: word_to_string(w2),
            coefficient: c.to_string(),
        })
        .collect();
    let report = ProbeReport {
        n,
        generator: g.to_string(),
        coproduct: cop.to_string(),
        terms,
    };
    emit(&report)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct CheckLine {
    name: String,
    ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<String>,
}

#[derive(Serialize)]
struct SuiteReport {
    suite: String,
    n: u8,
    samples: usize,
    seed: u64,
    jobs: usize,
    checks: Vec<CheckLine>,
    ok: bool,
}

fn finish_suite(
    suite: &str,
    n: u8,
    samples: usize,
    seed: u64,
    checks: Vec<CheckLine>,
) -> Result<i32, CoreError> {
    let ok = checks.iter().all(|c| c.ok);
    let report = SuiteReport {
        suite: suite.into(),
        n,
        samples,
        seed,
        jobs: jobs(),
        checks,
        ok,
    };
    emit(&report)?;
    Ok(if ok { EXIT_OK } else { EXIT_CHECK })
}

fn sdelta_checks(n: u8, samples: usize, seed: u64) -> Result<Vec<CheckLine>, CoreError> {
    let gens = degree_one_generators(n);
    let mut checks = Vec::new();
    for g in &gens {
        let h = HopfElement::generator(n, g.clone());
        let twice = s_delta(&s_delta(&h)?)?;
        checks.push(CheckLine {
            name: format!("S_delta^2({}) = {}", g, g),
            ok: twice == h,
            witness: (twice != h).then(|| twice.to_string()),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for s in 0..samples {
        let g1 = gens[rng.gen_range(0..gens.len())].clone();
        let g2 = gens[rng.gen_range(0..gens.len())].clone();
        let h = HopfElement::generator(n, g1.clone()).mul(&HopfElement::generator(n, g2.clone()));
        let twice = s_delta(&s_delta(&h)?)?;
        checks.push(CheckLine {
            name: format!("S_delta^2 on product {} (sample {})", h, s),
            ok: twice == h,
            witness: (twice != h).then(|| twice.to_string()),
        });
    }
    Ok(checks)
}

fn structure_checks(n: u8, samples: usize, seed: u64) -> Result<Vec<CheckLine>, CoreError> {
    let d = |i, j, k, ls: &[u8]| HGen::delta(i, j, k, ls);
    let mut checks = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            for k in 1..=n {
                for l in 1..=n {
                    let lhs: Vec<(Word, Rational)> = vec![
                        (vec![d(i, j, l, &[k])], rat_int(1)),
                        (vec![d(i, j, k, &[l])], rat_int(-1)),
                    ];
                    let mut rhs: Vec<(Word, Rational)> = Vec::new();
                    for s in 1..=n {
                        rhs.push((vec![d(s, j, k, &[]), d(i, s, l, &[])], rat_int(1)));
                        rhs.push((vec![d(s, j, l, &[]), d(i, s, k, &[])], rat_int(-1)));
                    }
                    let mix = seed ^ (i as u64) << 24 ^ (j as u64) << 16 ^ (k as u64) << 8 ^ l as u64;
                    let ok = operators_equal(n, &lhs, &rhs, 4, samples.max(1), mix)?;
                    checks.push(CheckLine {
                        name: format!(
                            "d^{}_{{{}{};{}}} - d^{}_{{{}{};{}}} = [sum_s d^s_{{{}{}}} d^{}_{{s{}}}]",
                            i, j, l, k, i, j, k, l, j, k, i, l
                        ),
                        ok,
                        witness: (!ok).then(|| "operator actions differ".into()),
                    });
                }
            }
        }
    }
    Ok(checks)
}

fn leibniz_checks(n: u8, samples: usize, seed: u64) -> Result<Vec<CheckLine>, CoreError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    for g in degree_one_generators(n) {
        let cop = coproduct(n, &g)?;
        let mut ok = true;
        let mut witness = None;
        for s in 0..samples.max(1).min(3) {
            let a = random_crossed(n, 4, 2, &mut rng, &format!("lbz-a{}-{}", seed, s));
            let b = random_crossed(n, 4, 2, &mut rng, &format!("lbz-b{}-{}", seed, s));
            let ab = mul_monomials(&a, &b)?;
            let lhs = act_gen(&g, &ab)?;
            let mut rhs = CrossedElement::zero(n);
            for ((w1, w2), c) in cop.terms() {
                let m = mul_monomials(&act_word(w1, &a)?, &act_word(w2, &b)?)?;
                rhs.add_monomial(CrossedMonomial {
                    f: m.f.scale(c),
                    phi: m.phi,
                });
            }
            let diff = CrossedElement::from_monomial(lhs).sub(&rhs);
            if !diff.is_zero() {
                ok = false;
                witness = Some(format!("sample {} leaves a nonzero residual", s));
                break;
            }
        }
        checks.push(CheckLine {
            name: format!("Delta({}) satisfies the Leibniz rule", g),
            ok,
            witness,
        });
    }
    Ok(checks)
}

fn cmd_hopf_verify(suite: HopfSuite, n: u8, samples: usize, seed: u64) -> Result<i32, CoreError> {
    let (name, checks) = match suite {
        HopfSuite::Sdelta => ("sdelta", sdelta_checks(n, samples, seed)?),
        HopfSuite::Structure => ("structure", structure_checks(n, samples, seed)?),
        HopfSuite::Leibniz => ("leibniz", leibniz_checks(n, samples, seed)?),
    };
    finish_suite(name, n, samples, seed, checks)
}

// --- cyclic -----------------------------------------------------------------

fn vanishes_relatively(t: &CyclicTensor) -> Result<bool, CoreError> {
    Ok(t.is_zero() || is_null_tensor(t)?)
}

fn cmd_cyclic_verify(
    suite: CyclicSuite,
    q: usize,
    n: u8,
    samples: usize,
    seed: u64,
) -> Result<i32, CoreError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    for s in 0..samples {
        let t = random_cyclic_tensor(n, q, 2, 2, &mut rng);
        match suite {
            CyclicSuite::Tau => {
                let mut u = t.clone();
                for _ in 0..=q {
                    u = rel_tau(&u)?;
                }
                let ok = eq_mod_null(&u, &t)?;
                checks.push(CheckLine {
                    name: format!("tau^{} = Id (sample {})", q + 1, s),
                    ok,
                    witness: (!ok).then(|| format!("tau^{}(t) - t != 0", q + 1)),
                });
            }
            CyclicSuite::Bb => {
                let mut lines = vec![(
                    format!("b^2 = 0 (sample {})", s),
                    vanishes_relatively(&rel_b(&rel_b(&t)?)?)?,
                )];
                // B lowers the degree, so B^2 needs q >= 2
                if q >= 2 {
                    lines.push((
                        format!("B^2 = 0 (sample {})", s),
                        vanishes_relatively(&rel_big_b(&rel_big_b(&t)?)?)?,
                    ));
                }
                let anti = rel_b(&rel_big_b(&t)?)?.add(&rel_big_b(&rel_b(&t)?)?);
                lines.push((
                    format!("bB + Bb = 0 (sample {})", s),
                    vanishes_relatively(&anti)?,
                ));
                for (name, ok) in lines {
                    checks.push(CheckLine {
                        name,
                        ok,
                        witness: (!ok).then(|| "nonzero residual".into()),
                    });
                }
            }
        }
    }
    let name = match suite {
        CyclicSuite::Tau => "tau",
        CyclicSuite::Bb => "bB",
    };
    finish_suite(name, n, samples, seed, checks)
}

// --- extract ----------------------------------------------------------------

#[derive(Serialize)]
struct TensorTermJson {
    legs: Vec<String>,
    coefficient: String,
}

#[derive(Serialize)]
struct ExtractReport {
    n: u8,
    class: String,
    level: u8,
    q: usize,
    normalization: Option<String>,
    gl_invariant: bool,
    terms: Vec<TensorTermJson>,
}

fn cmd_extract(a: ExtractArgs) -> Result<i32, CoreError> {
    let j = parse_class(&a.class)?;
    let total: u8 = j.iter().sum();
    let level = a.level.unwrap_or(total);
    let tpl = jet_template(a.n, &j, level)?;
    let ex = extract_hopf_tensor(&tpl)?;
    let terms = ex
        .tensor
        .inner()
        .terms()
        .iter()
        .map(|(legs, c)| TensorTermJson {
            legs: legs.iter().map(|w| word_to_string(w)).collect(),
            coefficient: c.to_string(),
        })
        .collect();
    let report = ExtractReport {
        n: a.n,
        class: class_string(&j),
        level,
        q: ex.tensor.q(),
        normalization: ex.normalization.map(|c| c.to_string()),
        gl_invariant: gl_invariance_check(&ex.tensor),
        terms,
    };
    if let Some(path) = &a.emit {
        fs::write(path, serde_json::to_string_pretty(&report)?)?;
    }
    emit(&report)?;
    Ok(EXIT_OK)
}

// --- suite ------------------------------------------------------------------

#[derive(Serialize)]
struct FullSuiteReport {
    n: u8,
    seed: u64,
    all: bool,
    jobs: usize,
    checks: Vec<CheckLine>,
    ok: bool,
}

fn check(name: &str, r: Result<Result<(), String>, CoreError>) -> CheckLine {
    match r {
        Ok(Ok(())) => CheckLine {
            name: name.into(),
            ok: true,
            witness: None,
        },
        Ok(Err(w)) => CheckLine {
            name: name.into(),
            ok: false,
            witness: Some(w),
        },
        Err(e) => CheckLine {
            name: name.into(),
            ok: false,
            witness: Some(e.to_string()),
        },
    }
}

fn quad_diffeo() -> Result<JetDiffeo, CoreError> {
    let x = Poly::var(Var::X(1));
    JetDiffeo::new(1, vec![x.add(&x.mul(&x))], "suite-quad")
}

fn fixture_check() -> Result<Result<(), String>, CoreError> {
    let id = JetDiffeo::identity(1);
    let quad = quad_diffeo()?;
    let c1 = chern_cocycle(&[1], &[id.clone(), quad.clone()], Mode::Base)?;
    let coeff = c1.coeff(&[Gen::Dx(1)]);
    let one_plus = Poly::one().add(&Poly::var(Var::X(1)).scale(&rat_int(2)));
    if coeff.mul_poly(&one_plus).normalize().as_constant() != Some(rat_int(-2)) {
        return Ok(Err(format!("C1^(1)(id, x+x^2) = {}, not -2/(1+2x) dx", c1)));
    }
    if c1.terms().count() != 1 {
        return Ok(Err(format!("extra terms in C1^(1): {}", c1)));
    }
    let c0 = chern_cocycle(&[1], &[quad.clone()], Mode::Base)?;
    if !c0.is_zero() {
        return Ok(Err(format!("C1^(0) = {} != 0", c0)));
    }
    let c2 = chern_cocycle(
        &[1],
        &[quad.compose(&quad)?, quad.clone(), id],
        Mode::Base,
    )?;
    if !c2.is_zero() {
        return Ok(Err(format!("C1^(2) = {} != 0", c2)));
    }
    Ok(Ok(()))
}

fn closedness_check(n: u8, j: &[u8], mode: ClosednessMode) -> Result<Result<(), String>, CoreError> {
    let reports = total_closedness(n, j, mode)?;
    for r in reports {
        if !r.ok {
            return Ok(Err(format!(
                "level {}: residual {}",
                r.level,
                r.residual.unwrap_or_default()
            )));
        }
    }
    Ok(Ok(()))
}

fn all_pass(checks: Vec<CheckLine>) -> Result<(), String> {
    for c in checks {
        if !c.ok {
            return Err(format!(
                "{}: {}",
                c.name,
                c.witness.unwrap_or_else(|| "failed".into())
            ));
        }
    }
    Ok(())
}

fn gl_basic_check(seed: u64) -> Result<Result<(), String>, CoreError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tuple: Vec<JetDiffeo> = (0..2)
        .map(|i| random_diffeo_labeled(2, &mut rng, &format!("glb{}-{}", seed, i)))
        .collect();
    let rhat = simplicial_curvature(&tuple, Mode::Frame)?;
    for j in [vec![1u8], vec![2u8], vec![1u8, 1u8]] {
        let cj = chern_class_product(&j, &rhat)?;
        if !is_gl_basic(&cj) {
            return Ok(Err(format!("{} is not basic in frame mode", class_string(&j))));
        }
    }
    Ok(Ok(()))
}

fn random_diffeo_labeled(n: u8, rng: &mut ChaCha8Rng, label: &str) -> JetDiffeo {
    crate::sample::random_diffeo(n, 2, rng, label)
}

/// Top-level oracle: C_q^{(q)} against the alternating trace (q = 1, where
/// the single trace is the whole polarization of c_1) or the alternating
/// full polarization of c_q (q >= 2, where the single trace alone misses
/// the Tr x Tr cross terms of c_q on non-volume-preserving jets).
fn antisym_trace_check(q: u8, seed: u64) -> Result<Result<(), String>, CoreError> {
    let n = 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ q as u64);
    let mut kappa: Option<Rational> = None;
    for round in 0..5 {
        let tuple: Vec<JetDiffeo> = (0..=q)
            .map(|i| random_diffeo_labeled(n, &mut rng, &format!("ast{}-{}-{}", q, round, i)))
            .collect();
        let lhs = chern_cocycle(&[q], &tuple, Mode::Base)?;
        let rhs = if q == 1 {
            antisym_trace(q, &tuple)?
        } else {
            antisym_polarization(q, &tuple)?
        };
        if lhs.is_zero() && rhs.is_zero() {
            continue;
        }
        if rhs.is_zero() {
            return Ok(Err(format!("round {}: trace side vanished", round)));
        }
        let k = match &kappa {
            Some(k) => k.clone(),
            None => {
                let (gens, cr) = rhs
                    .terms()
                    .find(|(_, c)| !c.is_zero())
                    .map(|(g, c)| (g.clone(), c.clone()))
                    .expect("nonzero form");
                let k = infer_ratio(&lhs.coeff(&gens), &cr)?;
                kappa = Some(k.clone());
                k
            }
        };
        if !lhs.sub(&rhs.scale(&k)).is_zero() {
            return Ok(Err(format!(
                "round {}: C_{}^{{({})}} is not {} times the antisymmetrized trace",
                round, q, q, k
            )));
        }
    }
    if kappa.is_none() {
        return Ok(Err("all samples vanished".into()));
    }
    Ok(Ok(()))
}

fn extract_check(n: u8, j: &[u8], with_integrand: bool) -> Result<Result<(), String>, CoreError> {
    let total: u8 = j.iter().sum();
    let tpl = jet_template(n, j, total)?;
    let ex = extract_hopf_tensor(&tpl)?;
    if ex.tensor.is_zero() {
        return Ok(Err("extracted tensor is zero".into()));
    }
    if !gl_invariance_check(&ex.tensor) {
        return Ok(Err("extracted tensor is not gl-invariant".into()));
    }
    if n == 1 {
        if !vanishes_relatively(&rel_b(&ex.tensor)?)? {
            return Ok(Err("b(tensor) != 0 in the relative complex".into()));
        }
        if !vanishes_relatively(&rel_big_b(&ex.tensor)?)? {
            return Ok(Err("B(tensor) != 0 in the relative complex".into()));
        }
        if with_integrand {
            let cochain = chern_cochain(1, j, total, Mode::Base);
            let samples = phi_samples(1, ex.tensor.q(), 5, 0xF1);
            let report = phi_integrand_check(&ex.tensor, &cochain, &samples)?;
            if report.constant.is_none() {
                return Ok(Err("integrand comparison was vacuous".into()));
            }
        }
    }
    Ok(Ok(()))
}

fn cmd_suite(a: SuiteArgs) -> Result<i32, CoreError> {
    let n = a.n;
    let seed = a.seed;
    let mut checks: Vec<CheckLine> = Vec::new();
    if n == 1 {
        checks.push(check(
            "closedness-symbolic-c1",
            closedness_check(1, &[1], ClosednessMode::Symbolic { order: 3 }),
        ));
        checks.push(check("fixture-c1", fixture_check()));
        checks.push(check(
            "hopf-sdelta",
            sdelta_checks(1, 10, seed).map(all_pass),
        ));
        checks.push(check(
            "cyclic-tau-q1",
            cyclic_suite_pass(CyclicSuite::Tau, 1, 1, 10, seed),
        ));
        checks.push(check(
            "cyclic-bB-q1",
            cyclic_suite_pass(CyclicSuite::Bb, 1, 1, 10, seed),
        ));
        checks.push(check("extract-c1", extract_check(1, &[1], a.all)));
        if a.all {
            checks.push(check(
                "hopf-structure",
                structure_checks(1, 3, seed).map(all_pass),
            ));
            checks.push(check(
                "hopf-leibniz",
                leibniz_checks(1, 3, seed).map(all_pass),
            ));
            checks.push(check(
                "cyclic-tau-q2",
                cyclic_suite_pass(CyclicSuite::Tau, 2, 1, 10, seed),
            ));
            checks.push(check(
                "cyclic-bB-q2",
                cyclic_suite_pass(CyclicSuite::Bb, 2, 1, 10, seed),
            ));
        }
    } else if n == 2 {
        for j in [vec![1u8], vec![2u8], vec![1u8, 1u8]] {
            checks.push(check(
                &format!("closedness-randomized-{}", class_string(&j)),
                closedness_check(2, &j, ClosednessMode::Randomized { points: 20, seed }),
            ));
        }
        checks.push(check("gl-basic-frame", gl_basic_check(seed)));
        checks.push(check("antisym-trace-q1", antisym_trace_check(1, seed)));
        checks.push(check("antisym-polarization-q2", antisym_trace_check(2, seed)));
        checks.push(check("extract-c1", extract_check(2, &[1], false)));
        if a.all {
            checks.push(check(
                "hopf-sdelta",
                sdelta_checks(2, 10, seed).map(all_pass),
            ));
            checks.push(check(
                "hopf-structure",
                structure_checks(2, 3, seed).map(all_pass),
            ));
            checks.push(check(
                "hopf-leibniz",
                leibniz_checks(2, 3, seed).map(all_pass),
            ));
            checks.push(check("extract-c2", extract_check(2, &[2], false)));
            checks.push(check("extract-c1,c1", extract_check(2, &[1, 1], false)));
        }
    } else {
        return Err(CoreError::Unsupported(format!(
            "suite supports n = 1 and n = 2, got {}",
            n
        )));
    }
    let ok = checks.iter().all(|c| c.ok);
    let report = FullSuiteReport {
        n,
        seed,
        all: a.all,
        jobs: jobs(),
        checks,
        ok,
    };
    emit(&report)?;
    Ok(if ok { EXIT_OK } else { EXIT_CHECK })
}

fn cyclic_suite_pass(
    suite: CyclicSuite,
    q: usize,
    n: u8,
    samples: usize,
    seed: u64,
) -> Result<Result<(), String>, CoreError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for s in 0..samples {
        let t = random_cyclic_tensor(n, q, 2, 2, &mut rng);
        match suite {
            CyclicSuite::Tau => {
                let mut u = t.clone();
                for _ in 0..=q {
                    u = rel_tau(&u)?;
                }
                if !eq_mod_null(&u, &t)? {
                    return Ok(Err(format!("tau^{} != Id on sample {}", q + 1, s)));
                }
            }
            CyclicSuite::Bb => {
                if !vanishes_relatively(&rel_b(&rel_b(&t)?)?)? {
                    return Ok(Err(format!("b^2 != 0 on sample {}", s)));
                }
                // B lowers the degree, so B^2 needs q >= 2
                if q >= 2 && !vanishes_relatively(&rel_big_b(&rel_big_b(&t)?)?)? {
                    return Ok(Err(format!("B^2 != 0 on sample {}", s)));
                }
                let anti = rel_b(&rel_big_b(&t)?)?.add(&rel_big_b(&rel_b(&t)?)?);
                if !vanishes_relatively(&anti)? {
                    return Ok(Err(format!("bB + Bb != 0 on sample {}", s)));
                }
            }
        }
    }
    Ok(Ok(()))
}
