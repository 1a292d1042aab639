//! `hypineq`: command-line front end to the verification kernels.
//!
//! [`run`] parses arguments, executes one verb and writes the report; the
//! binary only forwards process arguments and the exit code.

mod error;
mod output;
mod spec_parse;

pub use error::CliError;
pub use output::Format;
pub use spec_parse::{bump_window, parse_grid, ProfileSpec};

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use hypineq_core::catalog::{Entry, InequalityShape, ModelConstraint, Params, Registry};
use hypineq_core::profiles::FamilyKind;
use hypineq_core::sharpness::{
    minimize_discrete, solve_paper_alpha, AlphaConvention, DiscreteGrid, DiscreteReport, GaussianScan,
    PaperAlphaReport, Problem, SweepFamily, SweepReport, TermValue, DEFAULT_A_CAP,
};
use hypineq_core::{FamilyOptions, ModelKind, SpaceModel};

use output::{columns, emit, num, opt, Report};

/// Exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_ADMISSIBILITY: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

const HARDY_EPS: [f64; 4] = [0.2, 0.1, 0.05, 0.025];
const RELLICH_EPS: [f64; 4] = [0.02, 0.01, 0.005, 0.0025];
const DEFAULT_WIDTHS: &str = "0.25:256:25:log";

#[derive(Debug, Parser)]
#[command(
    name = "hypineq",
    version,
    about = "Numerical checks of weighted Hardy, Rellich and uncertainty-principle inequalities on hyperbolic space",
    allow_negative_numbers = true,
    after_help = "Exit codes: 0 success, 1 usage, 2 inequality violated, 3 inadmissible parameters, 4 numerical failure.\n\
                  HYPINEQ_THREADS caps the worker threads (0 or unset: one per core)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the registered inequalities with their equation tags.
    #[command(after_help = "CSV columns: id,tag,shape,model,sharp_constant,family")]
    List {
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        /// Custom inequality document (JSON) to register alongside the built-ins.
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Check parameters against an inequality's admissibility constraints.
    #[command(after_help = "CSV columns: id,admissible,violation")]
    CheckParams(Common),
    /// Evaluate the residual of an inequality on test profiles.
    #[command(
        after_help = "CSV columns: profile,residual,main_residual,remainder,scale,error,holds\n\
        Profiles: bump:seed=N, bump:c=C,w=W, gaussian:a=A, hardy-conc:eps=E, rellich-conc:eps=E,\n\
        hardy-paper:eps=E[,D=D], rellich-paper:eps=E[,D=D], grid:file=PATH; each accepts A=amplitude."
    )]
    Verify {
        #[command(flatten)]
        common: Common,
        /// Profile specification; may be repeated. Without it, seeded bumps are used.
        #[arg(long)]
        profile: Vec<String>,
        /// Number of seeded bumps (seeds 0..N) when no profile is given.
        #[arg(long, default_value_t = 20)]
        bumps: u64,
    },
    /// Sweep the Rayleigh quotient along the extremal family.
    #[command(after_help = "CSV columns: shape,q,numerator,denominator,error\n\
        Grids are comma lists or start:stop:count:log|lin ranges.")]
    Sharpness {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "concentration")]
        family: FamilyArg,
        /// Shape parameters: decreasing ε, or increasing widths for Gaussian families.
        #[arg(long)]
        eps: Option<String>,
        /// Truncation radius of the extremal power families.
        #[arg(long = "D", default_value_t = 10.0)]
        truncate: f64,
    },
    /// Minimize the discretized quotient (quadratic forms only).
    #[command(after_help = "CSV columns: lambda_min,lambda_at_delta_tenth,d,value")]
    Minimize {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
        #[arg(long = "D", default_value_t = 10.0)]
        outer: f64,
        /// Number of log-spaced elements.
        #[arg(long, default_value_t = 1000)]
        points: usize,
    },
    /// Gaussian scan of an uncertainty-principle inequality.
    #[command(after_help = "CSV columns: a,q,numerator,denominator,error")]
    Hpw {
        #[command(flatten)]
        common: Common,
        /// Gaussian widths, increasing.
        #[arg(long = "a", default_value = DEFAULT_WIDTHS)]
        widths: String,
        /// Normalization of the Gaussian volume integrals in the width formula.
        #[arg(long, value_enum, default_value = "radial-only")]
        convention: ConventionArg,
        /// Starting width of the fixed-point iteration.
        #[arg(long, default_value_t = 1.0)]
        start: f64,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// Inequality id (see `hypineq list`).
    #[arg(long)]
    ineq: Option<String>,
    #[arg(long, value_enum, default_value = "hyperbolic")]
    model: ModelArg,
    #[arg(long)]
    n: u32,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    /// Geometric constant C (defaults to n − 1).
    #[arg(long = "C")]
    geom_c: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    /// Domain radius of the remainder inequalities.
    #[arg(long = "R")]
    radius: Option<f64>,
    /// Weighted Sobolev constant of the remainder terms.
    #[arg(long = "c")]
    fks_c: Option<f64>,
    /// Relative slack allowed before an inequality counts as violated.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Relative quadrature tolerance.
    #[arg(long, default_value_t = hypineq_core::quadrature::DEFAULT_TOL)]
    quad_tol: f64,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    /// Custom inequality document (JSON).
    #[arg(long)]
    spec: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    Hyperbolic,
    Euclidean,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Concentration,
    Paper,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConventionArg {
    RadialOnly,
    WithSphereArea,
}

impl Common {
    fn params(&self) -> Params {
        Params {
            n: self.n,
            alpha: self.alpha,
            p: self.p,
            geom_c: self.geom_c,
            q: self.q,
            s: self.s,
            radius: self.radius,
            fks_c: self.fks_c,
        }
    }

    fn kind(&self) -> ModelKind {
        match self.model {
            ModelArg::Hyperbolic => ModelKind::Hyperbolic,
            ModelArg::Euclidean => ModelKind::Euclidean,
        }
    }

    fn ineq(&self, default: Option<&str>) -> Result<String, CliError> {
        self.ineq
            .clone()
            .or_else(|| default.map(str::to_string))
            .ok_or_else(|| CliError::Usage("--ineq is required".into()))
    }

    fn base_dir(&self) -> &Path {
        self.spec
            .as_deref()
            .and_then(Path::parent)
            .unwrap_or_else(|| Path::new("."))
    }
}

fn registry(spec: Option<&Path>) -> Result<Registry, CliError> {
    // run the built-in startup checks once
    Registry::builtin();
    let mut r = Registry::with_builtins();
    if let Some(path) = spec {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        r.load(&text)?;
    }
    Ok(r)
}

fn entry<'r>(registry: &'r Registry, id: &str) -> Result<&'r Entry, CliError> {
    Ok(registry.get(id)?)
}

fn problem(common: &Common, default_id: Option<&str>) -> Result<Problem, CliError> {
    let reg = registry(common.spec.as_deref())?;
    let id = common.ineq(default_id)?;
    let e = entry(&reg, &id)?;
    let params = common.params();
    let adm = e.spec.admissible(&params);
    if !adm.is_admissible() {
        return Err(CliError::Admissibility(format!(
            "parameters are not admissible for {id}: {}",
            adm.violations.join("; ")
        )));
    }
    let model = SpaceModel::new(common.kind(), common.n).map_err(|e| CliError::Admissibility(e.to_string()))?;
    let problem = Problem::new(&e.spec, params, model)?;
    if !(common.quad_tol > 0.0 && common.tol >= 0.0) {
        return Err(CliError::Usage("tolerances must be positive".into()));
    }
    Ok(problem.with_tol(common.quad_tol))
}

/// Parses `argv` (program name first), runs the command and writes the
/// report to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    let threads = std::env::var("HYPINEQ_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker threads: {e}");
            return EXIT_NUMERIC;
        }
    };
    let (mut buf_out, mut buf_err) = (Vec::new(), Vec::new());
    let result = pool.install(|| execute(cli.command, &mut buf_out, &mut buf_err));
    let _ = out.write_all(&buf_out);
    let _ = err.write_all(&buf_err);
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::List { format, spec } => {
            let reg = registry(spec.as_deref())?;
            emit(&ListReport::new(&reg), format, out)?;
            Ok(EXIT_OK)
        }
        Command::CheckParams(common) => check_params(&common, out, err),
        Command::Verify { common, profile, bumps } => verify(&common, &profile, bumps, out, err),
        Command::Sharpness {
            common,
            family,
            eps,
            truncate,
        } => sharpness(&common, family, eps.as_deref(), truncate, out, err),
        Command::Minimize {
            common,
            delta,
            outer,
            points,
        } => {
            let p = problem(&common, None)?;
            let grid = DiscreteGrid { delta, outer, points };
            let report = minimize_discrete(&p, grid, true)?;
            emit(&MinimizeReport(report), common.format, out)?;
            Ok(EXIT_OK)
        }
        Command::Hpw {
            common,
            widths,
            convention,
            start,
        } => hpw(&common, &widths, convention, start, out, err),
    }
}

fn check_params(common: &Common, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let reg = registry(common.spec.as_deref())?;
    let id = common.ineq(None)?;
    let e = entry(&reg, &id)?;
    let params = common.params();
    let adm = e.spec.admissible(&params);
    let sharp_constant = if adm.is_admissible() {
        e.spec.sharp_constant(&params)?
    } else {
        None
    };
    let report = CheckReport {
        id: id.clone(),
        tag: e.tag.clone(),
        params,
        admissible: adm.is_admissible(),
        violations: adm.violations.clone(),
        sharp_constant,
    };
    emit(&report, common.format, out)?;
    if report.admissible {
        Ok(EXIT_OK)
    } else {
        writeln!(
            err,
            "error: parameters are not admissible for {id}: {}",
            report.violations.join("; ")
        )?;
        Ok(EXIT_ADMISSIBILITY)
    }
}

fn verify(
    common: &Common,
    profiles: &[String],
    bumps: u64,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let p = problem(common, None)?;
    let specs: Vec<String> = if profiles.is_empty() {
        (0..bumps).map(|seed| format!("bump:seed={seed}")).collect()
    } else {
        profiles.to_vec()
    };
    let built = specs
        .iter()
        .map(|s| Ok((s.clone(), ProfileSpec::parse(s)?.build(p.params(), common.base_dir())?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let rows = built
        .par_iter()
        .map(|(label, phi)| {
            let r = p.residual(phi)?;
            Ok(VerifyRow {
                profile: label.clone(),
                holds: r.holds(common.tol),
                residual: r.residual,
                main_residual: r.main_residual,
                remainder: r.remainder,
                scale: r.scale,
                error: r.error,
                terms: r.terms,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let all_hold = rows.iter().all(|r| r.holds);
    let report = VerifyReport {
        id: p.id().to_string(),
        model: p.model().kind(),
        params: *p.params(),
        tol: common.tol,
        all_hold,
        rows,
    };
    emit(&report, common.format, out)?;
    if all_hold {
        Ok(EXIT_OK)
    } else {
        let bad: Vec<&str> = report
            .rows
            .iter()
            .filter(|r| !r.holds)
            .map(|r| r.profile.as_str())
            .collect();
        writeln!(err, "error: {} violated on {}", report.id, bad.join(", "))?;
        Ok(EXIT_VIOLATION)
    }
}

/// Rows whose quotient falls below the sharp constant by more than the
/// quadrature error and `tol·K`.
fn below_constant<'a>(rows: impl Iterator<Item = (f64, f64, f64)> + 'a, k: Option<f64>, tol: f64) -> Vec<f64> {
    let Some(k) = k else { return Vec::new() };
    rows.filter(|&(_, q, e)| q < k - e.max(tol * k.abs()))
        .map(|(s, _, _)| s)
        .collect()
}

fn sharpness(
    common: &Common,
    family: FamilyArg,
    eps: Option<&str>,
    truncate: f64,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let p = problem(common, None)?;
    let kind = p.built().sharpness_family;
    let gaussian = kind == Some(FamilyKind::Gaussian) || p.built().shape == InequalityShape::Product;
    let shapes = match eps {
        Some(text) => parse_grid(text)?,
        None if gaussian => parse_grid(DEFAULT_WIDTHS)?,
        None if matches!(kind, Some(FamilyKind::RellichConcentration | FamilyKind::RellichPaper)) => {
            RELLICH_EPS.to_vec()
        }
        None => HARDY_EPS.to_vec(),
    };
    let options = FamilyOptions {
        truncate_at: truncate,
        ..FamilyOptions::default()
    };
    let family = match family {
        FamilyArg::Concentration => SweepFamily::Concentration,
        FamilyArg::Paper => SweepFamily::Paper,
    };
    let report = p.sweep(family, &shapes, &options)?;
    let low = below_constant(
        report.rows.iter().map(|r| (r.shape, r.q, r.error)),
        report.sharp_constant,
        common.tol,
    );
    emit(&SweepOut(report), common.format, out)?;
    if low.is_empty() {
        Ok(EXIT_OK)
    } else {
        writeln!(err, "error: quotient below the sharp constant at {low:?}")?;
        Ok(EXIT_VIOLATION)
    }
}

fn hpw(
    common: &Common,
    widths: &str,
    convention: ConventionArg,
    start: f64,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let p = problem(common, Some("hpw"))?;
    if p.built().shape != InequalityShape::Product {
        return Err(CliError::Usage(format!(
            "{} is not an uncertainty-principle inequality",
            p.id()
        )));
    }
    let widths = parse_grid(widths)?;
    let scan = p.gaussian_scan(&widths)?;
    let convention = match convention {
        ConventionArg::RadialOnly => AlphaConvention::RadialOnly,
        ConventionArg::WithSphereArea => AlphaConvention::WithSphereArea,
    };
    let default_c = p.params().geometric_c() == f64::from(common.n) - 1.0;
    let paper_alpha = if p.id() == "hpw" && common.n > 2 && default_c && p.model().kind() == ModelKind::Hyperbolic {
        Some(solve_paper_alpha(common.n, convention, start, DEFAULT_A_CAP)?)
    } else {
        None
    };
    let k = scan.sweep.sharp_constant;
    let mut low = below_constant(scan.sweep.rows.iter().map(|r| (r.shape, r.q, r.error)), k, common.tol);
    low.extend(below_constant(
        std::iter::once((scan.argmin, scan.min_q, 0.0)),
        k,
        common.tol,
    ));
    emit(&HpwReport { scan, paper_alpha }, common.format, out)?;
    if low.is_empty() {
        Ok(EXIT_OK)
    } else {
        writeln!(err, "error: quotient below the sharp constant at widths {low:?}")?;
        Ok(EXIT_VIOLATION)
    }
}

// ---- reports ----

#[derive(Debug, Serialize)]
struct ListRow {
    id: String,
    tag: String,
    shape: &'static str,
    model: &'static str,
    sharp_constant: Option<String>,
    family: Option<&'static str>,
}

#[derive(Debug, Serialize)]
struct ListReport {
    entries: Vec<ListRow>,
}

impl ListReport {
    fn new(reg: &Registry) -> Self {
        let entries = reg
            .entries()
            .iter()
            .map(|e| ListRow {
                id: e.spec.id.clone(),
                tag: e.tag.clone(),
                shape: match e.spec.shape {
                    InequalityShape::Linear => "linear",
                    InequalityShape::Product => "product",
                },
                model: match e.spec.model {
                    ModelConstraint::Hyperbolic => "hyperbolic",
                    ModelConstraint::Any => "any",
                },
                sharp_constant: e.spec.sharp_constant.as_ref().map(ToString::to_string),
                family: e.spec.sharpness_family.map(|f| f.name()),
            })
            .collect();
        Self { entries }
    }
}

impl Report for ListReport {
    fn csv_header(&self) -> &'static [&'static str] {
        &["id", "tag", "shape", "model", "sharp_constant", "family"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.entries
            .iter()
            .map(|e| {
                vec![
                    e.id.clone(),
                    e.tag.clone(),
                    e.shape.into(),
                    e.model.into(),
                    e.sharp_constant.clone().unwrap_or_default(),
                    e.family.unwrap_or_default().into(),
                ]
            })
            .collect()
    }

    fn table(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .csv_rows()
            .into_iter()
            .map(|mut r| {
                for c in r.iter_mut().skip(4) {
                    if c.is_empty() {
                        *c = "-".into();
                    }
                }
                r
            })
            .collect();
        columns(self.csv_header(), &rows)
    }
}

#[derive(Debug, Serialize)]
struct CheckReport {
    id: String,
    tag: String,
    params: Params,
    admissible: bool,
    violations: Vec<String>,
    sharp_constant: Option<f64>,
}

impl Report for CheckReport {
    fn csv_header(&self) -> &'static [&'static str] {
        &["id", "admissible", "violation"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        if self.violations.is_empty() {
            return vec![vec![self.id.clone(), "true".into(), String::new()]];
        }
        self.violations
            .iter()
            .map(|v| vec![self.id.clone(), "false".into(), v.clone()])
            .collect()
    }

    fn table(&self) -> String {
        let mut s = format!("{} {}\n", self.id, self.tag);
        if self.admissible {
            s += "admissible\n";
            if let Some(k) = self.sharp_constant {
                s += &format!("sharp constant  {}\n", num(k));
            }
        } else {
            s += "not admissible:\n";
            for v in &self.violations {
                s += &format!("  {v}\n");
            }
        }
        s
    }
}

#[derive(Debug, Serialize)]
struct VerifyRow {
    profile: String,
    residual: f64,
    main_residual: f64,
    remainder: f64,
    scale: f64,
    error: f64,
    holds: bool,
    terms: Vec<TermValue>,
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    id: String,
    model: ModelKind,
    params: Params,
    tol: f64,
    all_hold: bool,
    rows: Vec<VerifyRow>,
}

impl Report for VerifyReport {
    fn csv_header(&self) -> &'static [&'static str] {
        &[
            "profile",
            "residual",
            "main_residual",
            "remainder",
            "scale",
            "error",
            "holds",
        ]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.profile.clone(),
                    num(r.residual),
                    num(r.main_residual),
                    num(r.remainder),
                    num(r.scale),
                    num(r.error),
                    r.holds.to_string(),
                ]
            })
            .collect()
    }

    fn table(&self) -> String {
        let head = format!("{} on the {} model, tol {}\n", self.id, self.model, num(self.tol));
        head + &columns(self.csv_header(), &self.csv_rows())
    }
}

#[derive(Debug, Serialize)]
#[serde(transparent)]
struct SweepOut(SweepReport);

fn sweep_rows(r: &SweepReport) -> Vec<Vec<String>> {
    r.rows
        .iter()
        .map(|row| {
            vec![
                num(row.shape),
                num(row.q),
                num(row.numerator),
                num(row.denominator),
                num(row.error),
            ]
        })
        .collect()
}

fn sweep_summary(r: &SweepReport) -> String {
    format!(
        "extrapolated limit  {}\nsharp constant      {}\nrelative gap        {}\n",
        num(r.extrapolated_limit),
        opt(r.sharp_constant),
        opt(r.relative_gap)
    )
}

impl Report for SweepOut {
    fn csv_header(&self) -> &'static [&'static str] {
        &["shape", "q", "numerator", "denominator", "error"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        sweep_rows(&self.0)
    }

    fn table(&self) -> String {
        let r = &self.0;
        let head = format!("{} on the {} model, {} family\n", r.id, r.model, r.family);
        head + &columns(self.csv_header(), &self.csv_rows()) + &sweep_summary(r)
    }
}

#[derive(Debug, Serialize)]
#[serde(transparent)]
struct MinimizeReport(DiscreteReport);

impl Report for MinimizeReport {
    fn csv_header(&self) -> &'static [&'static str] {
        &["lambda_min", "lambda_at_delta_tenth", "d", "value"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let r = &self.0;
        r.nodes
            .iter()
            .zip(&r.eigenvector)
            .map(|(d, v)| vec![num(r.lambda_min), opt(r.lambda_at_delta_tenth), num(*d), num(*v)])
            .collect()
    }

    fn table(&self) -> String {
        let r = &self.0;
        format!(
            "{} on the {} model, grid [{}, {}] with {} elements\n\
             lambda_min              {}\n\
             lambda_min at delta/10  {}\n\
             sharp constant          {}\n",
            r.id,
            r.model,
            num(r.grid.delta),
            num(r.grid.outer),
            r.grid.points,
            num(r.lambda_min),
            opt(r.lambda_at_delta_tenth),
            opt(r.sharp_constant)
        )
    }
}

#[derive(Debug, Serialize)]
struct HpwReport {
    #[serde(flatten)]
    scan: GaussianScan,
    paper_alpha: Option<PaperAlphaReport>,
}

impl Report for HpwReport {
    fn csv_header(&self) -> &'static [&'static str] {
        &["a", "q", "numerator", "denominator", "error"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        sweep_rows(&self.scan.sweep)
    }

    fn table(&self) -> String {
        let r = &self.scan.sweep;
        let mut s = format!("{} on the {} model, Gaussian widths\n", r.id, r.model);
        s += &columns(self.csv_header(), &self.csv_rows());
        s += &sweep_summary(r);
        s += &format!(
            "refined minimum     {} at a = {}\n",
            num(self.scan.min_q),
            num(self.scan.argmin)
        );
        if let Some(pa) = &self.paper_alpha {
            let state = if pa.converged {
                "converged"
            } else if pa.diverged {
                "diverged"
            } else {
                "stopped"
            };
            s += &format!(
                "width iteration     {state} after {} steps, a = {}, Q = {}, gap = {}\n",
                pa.iterations,
                num(pa.a),
                num(pa.q),
                num(pa.gap)
            );
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_usable() {
        assert_eq!(parse_grid(DEFAULT_WIDTHS).unwrap().len(), 25);
    }
}
