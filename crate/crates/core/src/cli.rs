//! Command-line front end.
//!
//! Exit codes: 0 when every check passed, 1 when a check failed, 2 on a
//! parse or configuration error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::analysis::{self, CheckReport, FinitePair};
use crate::error::{Error, Result};
use crate::io::{self, MatrixFile, SymbolFile};
use crate::lattice::{AntiIndex, IndexWindow, Lattice};
use crate::operators::{self, OperatorMatrix};
use crate::spaces::{self, GammaPoint};
use crate::symbols::FourierSymbol;

pub const DEFAULT_D: i64 = 16;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_GRID: usize = 512;
pub const DEFAULT_MAX_D: i64 = 256;
pub const MAX_D_VAR: &str = "SYMTOEP_MAX_D";

#[derive(Debug, Parser)]
#[command(name = "symtoep", version, about = "Toeplitz-type operators on the Hardy space of the symmetrized bidisc")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Window size: indices with a <= D.
    #[arg(long = "D", default_value_t = DEFAULT_D)]
    pub d: i64,
    /// Safe-window margin; defaults to bandwidth + 1.
    #[arg(long)]
    pub margin: Option<i64>,
    #[arg(long = "tol", alias = "tolerance", default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Write JSON here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Torus grid size for sup-norm estimates.
    #[arg(long, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SymbolArg {
    /// Symbol JSON file.
    #[arg(long)]
    pub symbol: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct OperatorArg {
    /// Symbol JSON file; the operator is built from it.
    #[arg(long, conflicts_with = "matrix")]
    pub symbol: Option<PathBuf>,
    /// Matrix JSON file with row and column windows.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Demo {
    Coburn,
    Example29,
    Remark36,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Toeplitz section T_f on the Hardy window.
    BuildToeplitz(BuildArgs),
    /// Laurent section M_f on the full window.
    BuildLaurent(BuildArgs),
    /// Hankel section H_f from the Hardy window into the co-Hardy window.
    BuildHankel(BuildArgs),
    /// Dual Toeplitz section DT_f on the co-Hardy window.
    BuildDual(BuildArgs),
    /// Brown-Halmos relations for a Hardy-window section.
    CheckBh {
        #[command(flatten)]
        op: OperatorArg,
        #[command(flatten)]
        common: Common,
    },
    /// Read the symbol of a Toeplitz section.
    RecoverSymbol {
        #[command(flatten)]
        op: OperatorArg,
        #[arg(long)]
        beta: i64,
        #[command(flatten)]
        common: Common,
    },
    /// Analytic symbol versus commutation with T_s, T_p.
    CheckAnalytic {
        #[command(flatten)]
        symbol: SymbolArg,
        #[command(flatten)]
        common: Common,
    },
    /// Certify a pair of matrices as a Gamma-unitary (or Gamma-isometry).
    CertifyGamma {
        /// Matrix file for R (or T).
        #[arg(long)]
        r: PathBuf,
        /// Matrix file for U (or V).
        #[arg(long)]
        u: PathBuf,
        /// Check the Gamma-isometry axioms instead.
        #[arg(long)]
        isometry: bool,
        #[command(flatten)]
        common: Common,
    },
    /// eta_n(T) for n = 1..D/2.
    CompactProfile {
        #[command(flatten)]
        op: OperatorArg,
        #[command(flatten)]
        common: Common,
    },
    /// Asymptotic-Toeplitz profiles of T against a candidate symbol.
    AsymptoticCheck {
        /// Candidate symbol f.
        #[arg(long)]
        symbol: PathBuf,
        /// Section T; defaults to T_f.
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// Add the finite-rank projection F_k to T.
        #[arg(long)]
        add_fn: Option<i64>,
        #[command(flatten)]
        common: Common,
    },
    /// Brown-Halmos relations with respect to (DT_sbar, DT_pbar).
    CheckDualBh {
        #[command(flatten)]
        op: OperatorArg,
        #[command(flatten)]
        common: Common,
    },
    /// Ts* - Ts Tp* = Q X* Q with Q = I - Tp Tp*.
    FundamentalCheck {
        #[command(flatten)]
        common: Common,
    },
    /// Szego kernel computations.
    Szego {
        #[command(subcommand)]
        mode: SzegoMode,
    },
    /// Locate a point (s, p) relative to the symmetrized bidisc.
    ClassifyPoint {
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long = "tol", default_value_t = spaces::DEFAULT_POINT_TOL)]
        tol: f64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Worked examples.
    Demo {
        #[arg(value_enum)]
        which: Demo,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub symbol: SymbolArg,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct PointPair {
    #[arg(long, allow_hyphen_values = true)]
    pub s1: String,
    #[arg(long, allow_hyphen_values = true)]
    pub p1: String,
    #[arg(long, allow_hyphen_values = true)]
    pub s2: String,
    #[arg(long, allow_hyphen_values = true)]
    pub p2: String,
}

#[derive(Debug, Subcommand)]
pub enum SzegoMode {
    /// Closed-form kernel k(w1, w2).
    Eval {
        #[command(flatten)]
        points: PointPair,
        #[command(flatten)]
        common: Common,
    },
    /// Truncated kernel series against the closed form.
    PartialSum {
        #[command(flatten)]
        points: PointPair,
        #[command(flatten)]
        common: Common,
    },
    /// Kernel vector as joint eigenvector of (T_s*, T_p*).
    EigenResidual {
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[command(flatten)]
        common: Common,
    },
}

/// Complex number from `x`, `x,y`, `x+yi`, `x-yi` or `yi`.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Parse(format!("not a complex number: {text:?}"));
    if let Some((re, im)) = t.split_once(',') {
        return Ok(Complex64::new(re.parse().map_err(|_| bad())?, im.parse().map_err(|_| bad())?));
    }
    if let Ok(x) = t.parse::<f64>() {
        return Ok(Complex64::new(x, 0.0));
    }
    let body = t.strip_suffix('i').or_else(|| t.strip_suffix('j')).ok_or_else(bad)?;
    // split at the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        s => s,
    };
    Ok(Complex64::new(re.parse().map_err(|_| bad())?, im.parse().map_err(|_| bad())?))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn read_symbol(path: &Path) -> Result<FourierSymbol> {
    io::parse_symbol(&read(path)?)
}

fn read_matrix(path: &Path) -> Result<MatrixFile> {
    io::parse_matrix_file(&read(path)?)
}

fn max_d() -> Result<i64> {
    match std::env::var(MAX_D_VAR) {
        Ok(v) => v
            .trim()
            .parse::<i64>()
            .map_err(|_| Error::Parse(format!("{MAX_D_VAR}={v:?} is not an integer"))),
        Err(_) => Ok(DEFAULT_MAX_D),
    }
}

fn validate(common: &Common) -> Result<()> {
    if common.d < 1 {
        return Err(Error::OutOfRange(format!("D must be >= 1, got {}", common.d)));
    }
    let cap = max_d()?;
    if common.d > cap {
        return Err(Error::OutOfRange(format!("D={} exceeds {MAX_D_VAR}={cap}", common.d)));
    }
    if common.tol.is_nan() || common.tol <= 0.0 || !common.tol.is_finite() {
        return Err(Error::OutOfRange(format!("tolerance must be positive, got {}", common.tol)));
    }
    if let Some(m) = common.margin {
        if m < 0 {
            return Err(Error::OutOfRange(format!("margin must be >= 0, got {m}")));
        }
    }
    Ok(())
}

fn emit<T: Serialize>(value: &T, output: Option<&Path>) -> Result<()> {
    let mut text = io::to_json(value)?;
    text.push('\n');
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Parse(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// What a command produced: whether its checks passed and a one-line summary.
struct Outcome {
    passed: bool,
    summary: String,
}

fn report_outcome(r: &CheckReport, output: Option<&Path>) -> Result<Outcome> {
    emit(r, output)?;
    Ok(Outcome {
        passed: r.passed,
        summary: format!(
            "{}: {} (residual {:e}, tolerance {:e})",
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            r.residual,
            r.tolerance
        ),
    })
}

fn written(what: &str) -> Outcome {
    Outcome {
        passed: true,
        summary: what.to_string(),
    }
}

/// Operator from `--symbol` (built by `build`) or `--matrix`, with the
/// default margin `β + 1` (or 1 for an explicit matrix).
fn load_operator(
    op: &OperatorArg,
    common: &Common,
    build: impl Fn(&FourierSymbol, i64) -> Result<OperatorMatrix>,
) -> Result<(OperatorMatrix, i64)> {
    match (&op.symbol, &op.matrix) {
        (Some(path), None) => {
            let f = read_symbol(path)?;
            let t = build(&f, common.d)?;
            Ok((t, common.margin.unwrap_or(f.bandwidth() + 1)))
        }
        (None, Some(path)) => {
            let t = read_matrix(path)?.to_operator()?;
            if t.rows().a_max > max_d()? {
                return Err(Error::OutOfRange(format!("matrix window exceeds {MAX_D_VAR}")));
            }
            Ok((t, common.margin.unwrap_or(1)))
        }
        _ => Err(Error::Parse("give exactly one of --symbol or --matrix".into())),
    }
}

fn point(s: &str, p: &str) -> Result<GammaPoint> {
    Ok(GammaPoint::new(parse_complex(s)?, parse_complex(p)?))
}

#[derive(Serialize)]
struct ClassifyOut<'a> {
    class: &'a str,
    s: [f64; 2],
    p: [f64; 2],
    tolerance: f64,
}

#[derive(Serialize)]
struct KernelOut {
    name: &'static str,
    w1: [[f64; 2]; 2],
    w2: [[f64; 2]; 2],
    value: [f64; 2],
}

fn pt_json(w: GammaPoint) -> [[f64; 2]; 2] {
    [[w.s.re, w.s.im], [w.p.re, w.p.im]]
}

pub fn run(cli: Cli) -> Result<bool> {
    let outcome = execute(cli.command)?;
    eprintln!("{}", outcome.summary);
    Ok(outcome.passed)
}

fn execute(command: Command) -> Result<Outcome> {
    match command {
        Command::BuildToeplitz(a) => build(a, operators::build_toeplitz),
        Command::BuildLaurent(a) => build(a, |f, d| Ok(operators::build_laurent(f, IndexWindow::full(d)?))),
        Command::BuildHankel(a) => build(a, operators::build_hankel),
        Command::BuildDual(a) => build(a, operators::build_dual_toeplitz),
        Command::CheckBh { op, common } => {
            validate(&common)?;
            let (t, margin) = load_operator(&op, &common, operators::build_toeplitz)?;
            report_outcome(&analysis::check_brown_halmos(&t, margin, common.tol)?, common.output.as_deref())
        }
        Command::RecoverSymbol { op, beta, common } => {
            validate(&common)?;
            let (t, _) = load_operator(&op, &common, operators::build_toeplitz)?;
            let f = analysis::recover_symbol(&t, beta)?;
            emit(&SymbolFile::from_symbol(&f), common.output.as_deref())?;
            Ok(written(&format!("recover-symbol: {} coefficients", f.coeffs().len())))
        }
        Command::CheckAnalytic { symbol, common } => {
            validate(&common)?;
            let f = read_symbol(&symbol.symbol)?;
            report_outcome(&analysis::check_analyticity_equivalences(&f, common.d)?, common.output.as_deref())
        }
        Command::CertifyGamma { r, u, isometry, common } => {
            validate(&common)?;
            let pair = FinitePair::new(read_matrix(&r)?.to_matrix()?, read_matrix(&u)?.to_matrix()?)?;
            let rep = if isometry {
                analysis::certify_gamma_isometry(&pair, common.tol)?
            } else {
                analysis::certify_gamma_unitary(&pair, common.tol)?
            };
            report_outcome(&rep, common.output.as_deref())
        }
        Command::CompactProfile { op, common } => {
            validate(&common)?;
            let (t, _) = load_operator(&op, &common, operators::build_toeplitz)?;
            let profile = analysis::compactness_profile(&t)?;
            let mut rep = CheckReport::new("compactness-profile", common.tol).with_window(*t.rows(), None);
            rep.insert("profile", &profile);
            emit(&rep, common.output.as_deref())?;
            let tail = profile.last().map_or(0.0, |x| x.1);
            Ok(written(&format!("compactness-profile: {} values, eta at D/2 = {tail:e}", profile.len())))
        }
        Command::AsymptoticCheck {
            symbol,
            matrix,
            add_fn,
            common,
        } => {
            validate(&common)?;
            let f = read_symbol(&symbol)?;
            let mut t = match matrix {
                Some(p) => read_matrix(&p)?.to_operator()?,
                None => operators::build_toeplitz(&f, common.d)?,
            };
            if let Some(k) = add_fn {
                t = t.add(&operators::build_fn(k, t.rows().a_max)?)?;
            }
            report_outcome(&analysis::check_asymptotic_toeplitz(&t, &f, common.tol)?, common.output.as_deref())
        }
        Command::CheckDualBh { op, common } => {
            validate(&common)?;
            let (t, margin) = load_operator(&op, &common, operators::build_dual_toeplitz)?;
            report_outcome(&analysis::check_dual_toeplitz_bh(&t, margin, common.tol)?, common.output.as_deref())
        }
        Command::FundamentalCheck { common } => {
            validate(&common)?;
            report_outcome(&analysis::check_fundamental_operator(common.d, common.tol)?, common.output.as_deref())
        }
        Command::Szego { mode } => szego(mode),
        Command::ClassifyPoint { s, p, tol, output } => {
            let pt = point(&s, &p)?;
            let class = spaces::classify_point(pt, tol).as_str();
            emit(
                &ClassifyOut {
                    class,
                    s: [pt.s.re, pt.s.im],
                    p: [pt.p.re, pt.p.im],
                    tolerance: tol,
                },
                output.as_deref(),
            )?;
            Ok(written(&format!("classify-point: {class}")))
        }
        Command::Demo { which, common } => {
            validate(&common)?;
            let rep = match which {
                Demo::Coburn => demo_coburn(common.d)?,
                Demo::Example29 => demo_non_toeplitz_isometry(common.d, common.tol)?,
                Demo::Remark36 => demo_invariant_non_toeplitz(common.d, common.tol)?,
            };
            report_outcome(&rep, common.output.as_deref())
        }
    }
}

fn build(a: BuildArgs, f: impl Fn(&FourierSymbol, i64) -> Result<OperatorMatrix>) -> Result<Outcome> {
    validate(&a.common)?;
    let sym = read_symbol(&a.symbol.symbol)?;
    let op = f(&sym, a.common.d)?;
    emit(&MatrixFile::from_operator(&op), a.common.output.as_deref())?;
    Ok(written(&format!(
        "{}: {}x{} section on [{}]x[{}]",
        op.label(),
        op.entries().nrows(),
        op.entries().ncols(),
        op.rows(),
        op.cols()
    )))
}

fn szego(mode: SzegoMode) -> Result<Outcome> {
    match mode {
        SzegoMode::Eval { points, common } => {
            validate(&common)?;
            let (w1, w2) = (point(&points.s1, &points.p1)?, point(&points.s2, &points.p2)?);
            let k = spaces::szego_eval(w1, w2)?;
            emit(
                &KernelOut {
                    name: "szego-kernel",
                    w1: pt_json(w1),
                    w2: pt_json(w2),
                    value: [k.re, k.im],
                },
                common.output.as_deref(),
            )?;
            Ok(written(&format!("szego: k = {k}")))
        }
        SzegoMode::PartialSum { points, common } => {
            validate(&common)?;
            let (w1, w2) = (point(&points.s1, &points.p1)?, point(&points.s2, &points.p2)?);
            let exact = spaces::szego_eval(w1, w2)?;
            let partial = spaces::szego_partial_sum(w1, w2, common.d)?;
            let mut rep = CheckReport::new("szego-partial-sum", common.tol)
                .with_window(IndexWindow::hardy(common.d)?, None);
            rep.check("|partial - closed form|", (partial - exact).norm());
            rep.insert("closed_form", [exact.re, exact.im]);
            rep.insert("partial_sum", [partial.re, partial.im]);
            report_outcome(&rep, common.output.as_deref())
        }
        SzegoMode::EigenResidual { s, p, common } => {
            validate(&common)?;
            let w = point(&s, &p)?;
            let (rs, rp) = spaces::joint_eigen_residual(w, common.d)?;
            let mut rep = CheckReport::new("szego-eigen-residual", common.tol)
                .with_window(IndexWindow::hardy(common.d)?, None);
            rep.check("T_s* k - conj(s) k", rs);
            rep.check("T_p* k - conj(p) k", rp);
            report_outcome(&rep, common.output.as_deref())
        }
    }
}

/// The symbol `z₁²z̄₂² + z̄₁²z₂²` kills `ê_{1,0}` on both sides, so neither
/// `T_φ` nor `T_φ*` is injective.
pub fn demo_coburn(d: i64) -> Result<CheckReport> {
    if d < 6 {
        return Err(Error::OutOfRange(format!("coburn demo needs D >= 6, got {d}")));
    }
    let f = FourierSymbol::coburn();
    let t = operators::build_toeplitz(&f, d)?;
    let e = AntiIndex::new(1, 0)?;
    let col_norm = |op: &OperatorMatrix| op.column(e).iter().fold(0.0, |acc, (_, v)| acc + v.norm_sqr()).sqrt();
    let mut rep = CheckReport::new("demo-coburn", 0.0).with_window(*t.rows(), None);
    rep.check("|T_phi e(1,0)|", col_norm(&t));
    rep.check("|T_phi* e(1,0)|", col_norm(&t.adjoint()));
    rep.insert(
        "description",
        "phi = z1^2 conj(z2)^2 + conj(z1)^2 z2^2 is a nonzero symbol; T_phi and its adjoint both annihilate \
         e(1,0) = (z1 - z2)/sqrt(2), so neither is injective",
    );
    rep.insert("symbol", SymbolFile::from_symbol(&f));
    Ok(rep)
}

/// `X ê_{a,b} = ê_{a+1,b}` satisfies `T_p*XT_p = X` but not `T_s*XT_p = XT_s`;
/// the discrepancy has unit size.
pub fn demo_non_toeplitz_isometry(d: i64, tol: f64) -> Result<CheckReport> {
    if d < 6 {
        return Err(Error::OutOfRange(format!("demo needs D >= 6, got {d}")));
    }
    let x = operators::build_x(d)?;
    let bh = analysis::check_brown_halmos(&x, 2, tol)?;
    let first = bh.sub("Ts* T Tp - T Ts").map_or(f64::NAN, |s| s.residual);
    let second = bh.sub("Tp* T Tp - T").map_or(f64::NAN, |s| s.residual);
    let mut rep = CheckReport::new("demo-example29", tol).with_window(bh.window.unwrap(), Some(2));
    rep.check("Tp* X Tp - X", second);
    rep.check_with("| |Ts* X Tp - X Ts| - 1 |", (first - 1.0).abs(), 1e-3);
    rep.insert("first_relation_residual", first);
    rep.insert(
        "description",
        "the isometry X e(a,b) = e(a+1,b) commutes with T_p and satisfies the second Brown-Halmos relation, \
         but the first relation fails by -p, which has unit norm",
    );
    Ok(rep)
}

/// `X` is invariant under both compressions `T_p*ⁿ·T_pⁿ` and `X*ⁿ·Xⁿ`, yet it
/// is not Toeplitz.
pub fn demo_invariant_non_toeplitz(d: i64, tol: f64) -> Result<CheckReport> {
    if d < 8 {
        return Err(Error::OutOfRange(format!("demo needs D >= 8, got {d}")));
    }
    let x = operators::build_x(d)?;
    let w = *x.rows();
    let mut tp_inv: f64 = 0.0;
    let mut x_inv: f64 = 0.0;
    for n in 1..=d / 2 {
        let safe = w.safe_subwindow_in(n + 1, Lattice::Hardy)?;
        let shifted = |da: i64, db: i64| {
            OperatorMatrix::from_column_map(safe, safe, "shifted", |c| {
                let cc = AntiIndex::new(c.a() + da, c.b() + db).unwrap();
                safe.iter()
                    .filter_map(|r| {
                        let rr = AntiIndex::new(r.a() + da, r.b() + db).unwrap();
                        let v = x.entry(rr, cc);
                        (v != Complex64::new(0.0, 0.0)).then_some((r, v))
                    })
                    .collect()
            })
        };
        let xs = x.restrict_to(&safe)?;
        tp_inv = tp_inv.max(shifted(n, n).sub(&xs)?.max_abs());
        x_inv = x_inv.max(shifted(n, 0).sub(&xs)?.max_abs());
    }
    let bh = analysis::check_brown_halmos(&x, 2, tol)?;
    let first = bh.sub("Ts* T Tp - T Ts").map_or(f64::NAN, |s| s.residual);
    let mut rep = CheckReport::new("demo-remark36", tol).with_window(w, None);
    rep.check("max_n |Tp*^n X Tp^n - X|", tp_inv);
    rep.check("max_n |X*^n X X^n - X|", x_inv);
    rep.check_with("| |Ts* X Tp - X Ts| - 1 |", (first - 1.0).abs(), 1e-3);
    rep.insert(
        "description",
        "both compressions of X converge (they are constant) to X itself, yet X is not a Toeplitz operator",
    );
    Ok(rep)
}

/// Parse arguments, run, and map the outcome to an exit code.
pub fn main_entry() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
