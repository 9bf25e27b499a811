//! Command-line front end.
//!
//! Every command writes a TOML report (to `--out`, or stdout) whose `[meta]`
//! table records the artifact version, grid size, seed and tolerances. Exit
//! status: 0 on success, 1 on invalid input, 2 when a verification suite fails.

mod spec;

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::energy::{qle, qle_literal, residual, EnergyBreakdown};
use crate::error::{Error, Result};
use crate::geometry::{make_grid, AxisymMetric, Grid, ScalarField};
use crate::optimize::{
    convexity_guard, minimize_with, method_registry, MinimizeOptions, MinimizeReport, TauCoefficients, DEFAULT_MODES,
};
use crate::physdata::{load_physical_data, minkowski_surface_data, schwarzschild_sphere, write_table, PhysicalData};
use crate::verify::{suite_registry, Sampler, SuiteInput, TheoremReport, DEFAULT_SEED};

pub use spec::{key_values, schwarzschild, MetricSpec, TauSpec};

pub const DEFAULT_GRID: usize = 32;

const GRAMMAR: &str = "\
Time functions (--tau, --init, --minkowski tau0=...):
  zero                 the zero function
  0.3*P1 + 0.1*P2      a sum of Legendre modes c*Pl in cos(theta); a bare number is c*P0
  file:PATH            node values, one per line (last column is used; # comments)

Data sources:
  --schwarzschild m=M,r=R     coordinate sphere of radius R in Schwarzschild(M)
  --minkowski tau0=EXPR       graph of tau0 over --metric in Minkowski space
  --data FILE                 physical-data table (theta P Q normH alpha_theta)
  --metric NAME               unit-sphere | sphere:r=R | oblate:e=E | ellipsoid:c=C

Exit status: 0 success, 1 invalid input, 2 verification failure.";

#[derive(Debug, Parser)]
#[command(name = "qlmass", version, about = "Quasi-local energy of axially symmetric 2-surfaces", after_help = GRAMMAR)]
pub struct Cli {
    /// Number of Gauss–Legendre collocation nodes [default: 32, or the table size with --data]
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Seed for every random draw
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Report path (stdout when omitted)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SourceArgs {
    #[arg(long, value_name = "m=M,r=R", conflicts_with_all = ["minkowski", "data", "metric"])]
    pub schwarzschild: Option<String>,
    #[arg(long, value_name = "tau0=EXPR", conflicts_with = "data", allow_hyphen_values = true)]
    pub minkowski: Option<String>,
    #[arg(long, value_name = "FILE", conflicts_with = "metric")]
    pub data: Option<PathBuf>,
    #[arg(long, value_name = "NAME")]
    pub metric: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the quasi-local energy E(Σ, τ)
    Energy {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, default_value = "zero", allow_hyphen_values = true)]
        tau: String,
        /// Also report E/(8π)
        #[arg(long)]
        normalize: bool,
        /// Column file: theta tau normH
        #[arg(long)]
        columns: Option<PathBuf>,
    },
    /// Evaluate the Euler–Lagrange residual of E at τ
    Residual {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, default_value = "zero", allow_hyphen_values = true)]
        tau: String,
        /// Column file: theta residual
        #[arg(long)]
        columns: Option<PathBuf>,
    },
    /// Minimize E over τ in a truncated Legendre basis
    Minimize {
        #[command(flatten)]
        source: SourceArgs,
        /// Initial τ (projected onto the basis)
        #[arg(long, allow_hyphen_values = true, conflicts_with = "init_random")]
        init: Option<String>,
        /// Random initial coefficients uniform in [-SCALE, SCALE]
        #[arg(long, value_name = "SCALE")]
        init_random: Option<f64>,
        /// Highest Legendre mode
        #[arg(long, default_value_t = DEFAULT_MODES)]
        modes: usize,
        #[arg(long, default_value = "bfgs")]
        method: String,
        /// Stop once the gradient norm drops below this
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        #[arg(long, default_value_t = 500)]
        max_iter: usize,
        /// Column file: theta tau_star residual
        #[arg(long)]
        columns: Option<PathBuf>,
    },
    /// Run verification suites (identities, theorem1, theorem3, lemma41, or all)
    Verify {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, required = true, value_delimiter = ',')]
        suite: Vec<String>,
        /// τ for identities/lemma41, τ₀ for theorem1, first sample for theorem3
        #[arg(long, allow_hyphen_values = true)]
        tau: Option<String>,
        /// Extra seeded random samples per suite
        #[arg(long, default_value_t = 8)]
        samples: usize,
        /// Override the suite's primary tolerance
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Write a physical-data table
    GenData {
        #[command(flatten)]
        source: SourceArgs,
    },
}

/// Where the physical data comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Schwarzschild { m: f64, r: f64 },
    Minkowski { metric: MetricSpec, tau0: TauSpec },
    File(PathBuf),
    /// A bare metric, for suites that need no physical data.
    Metric(MetricSpec),
    None,
}

impl DataSource {
    pub fn from_args(a: &SourceArgs) -> Result<Self> {
        let metric = a.metric.as_deref().map(MetricSpec::parse).transpose()?;
        if let Some(s) = &a.schwarzschild {
            let (m, r) = schwarzschild(s)?;
            return Ok(DataSource::Schwarzschild { m, r });
        }
        if let Some(s) = &a.minkowski {
            let expr = s.trim().strip_prefix("tau0=").unwrap_or(s);
            return Ok(DataSource::Minkowski {
                metric: metric.unwrap_or(MetricSpec::Sphere { radius: 1.0 }),
                tau0: TauSpec::parse(expr)?,
            });
        }
        if let Some(p) = &a.data {
            return Ok(DataSource::File(p.clone()));
        }
        Ok(metric.map_or(DataSource::None, DataSource::Metric))
    }

    fn describe(&self) -> String {
        match self {
            DataSource::Schwarzschild { m, r } => format!("schwarzschild m={m},r={r}"),
            DataSource::Minkowski { metric, tau0 } => format!("minkowski tau0={tau0} over {metric}"),
            DataSource::File(p) => format!("file {}", p.display()),
            DataSource::Metric(m) => format!("metric {m}"),
            DataSource::None => "unit-sphere".into(),
        }
    }
}

/// Resolved command-line configuration shared by all commands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub grid_n: Option<usize>,
    pub seed: u64,
    pub source: DataSource,
    pub out: Option<PathBuf>,
    pub tolerances: BTreeMap<String, f64>,
}

impl RunConfig {
    pub fn new(cli_n: Option<usize>, seed: u64, source: DataSource, out: Option<PathBuf>) -> Self {
        RunConfig {
            grid_n: cli_n,
            seed,
            source,
            out,
            tolerances: BTreeMap::new(),
        }
    }

    pub fn tolerance(mut self, name: &'static str, value: f64) -> Result<Self> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::param(name, format!("tolerance must be positive, got {value}")));
        }
        self.tolerances.insert(name.to_string(), value);
        Ok(self)
    }

    fn grid(&self) -> Result<Arc<Grid>> {
        make_grid(self.grid_n.unwrap_or(DEFAULT_GRID))
    }

    /// The 2-metric and, when the source provides it, the physical data.
    pub fn resolve(&self) -> Result<(AxisymMetric, Option<PhysicalData>)> {
        match &self.source {
            DataSource::Schwarzschild { m, r } => {
                let d = schwarzschild_sphere(self.grid()?, *m, *r)?;
                Ok((d.metric.clone(), Some(d)))
            }
            DataSource::Minkowski { metric, tau0 } => {
                let grid = self.grid()?;
                let sigma = metric.build(grid.clone())?;
                let d = minkowski_surface_data(&sigma, &tau0.field(&grid)?)?;
                Ok((sigma, Some(d)))
            }
            DataSource::File(path) => {
                let d = load_physical_data(path)?;
                if let Some(n) = self.grid_n {
                    if n != d.grid().n_nodes() {
                        return Err(Error::NodeMismatch {
                            path: path.clone(),
                            reason: format!("--n {n} but the table has n={}", d.grid().n_nodes()),
                        });
                    }
                }
                Ok((d.metric.clone(), Some(d)))
            }
            DataSource::Metric(m) => Ok((m.build(self.grid()?)?, None)),
            DataSource::None => Ok((AxisymMetric::round_sphere(self.grid()?, 1.0)?, None)),
        }
    }

    pub fn physical_data(&self) -> Result<PhysicalData> {
        self.resolve()?.1.ok_or_else(|| {
            Error::Missing("physical data: pass --schwarzschild, --minkowski or --data".into())
        })
    }

    fn meta(&self, command: &str, grid_n: usize, tau: Option<&TauSpec>) -> Meta {
        Meta {
            artifact: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            grid_n,
            seed: self.seed,
            data: self.source.describe(),
            tau: tau.map(|t| t.to_string()),
            tolerances: self.tolerances.clone(),
        }
    }

    fn emit(&self, report: &impl Serialize) -> Result<()> {
        let text = toml::to_string(report)?;
        match &self.out {
            Some(p) => fs::write(p, text)?,
            None => io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

#[derive(Debug, Serialize)]
pub struct Meta {
    pub artifact: &'static str,
    pub version: &'static str,
    pub command: String,
    pub grid_n: usize,
    pub seed: u64,
    pub data: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<String>,
    pub tolerances: BTreeMap<String, f64>,
}

#[derive(Serialize)]
struct EnergyReport {
    meta: Meta,
    guard_margin: f64,
    /// The energy evaluated through the hyperbolic-angle form.
    literal_total: f64,
    literal_gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    total_over_8pi: Option<f64>,
    energy: EnergyBreakdown,
}

#[derive(Serialize)]
struct ResidualReport {
    meta: Meta,
    l2_norm: f64,
    max_abs: f64,
    /// `∫ residual dv`, which vanishes because E is invariant under τ → τ + c.
    integral: f64,
}

#[derive(Serialize)]
struct MinimizeOutput {
    meta: Meta,
    result: MinimizeReport,
}

#[derive(Serialize)]
struct VerifyReport {
    meta: Meta,
    pass: bool,
    suites: Vec<TheoremReport>,
}

/// Whether a command's checks held.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

fn write_columns(path: &Path, header: &[&str], grid: &Grid, fields: &[&ScalarField]) -> Result<()> {
    let mut text = format!("# n={}\n{}\n", grid.n_nodes(), header.join(" "));
    for (i, t) in grid.nodes().iter().enumerate() {
        text.push_str(&format!("{t:.16e}"));
        for f in fields {
            text.push_str(&format!(" {:.16e}", f[i]));
        }
        text.push('\n');
    }
    fs::write(path, text)?;
    Ok(())
}

pub fn run(cli: Cli) -> Result<Outcome> {
    let base = |s: &SourceArgs| -> Result<RunConfig> {
        Ok(RunConfig::new(cli.n, cli.seed, DataSource::from_args(s)?, cli.out.clone()))
    };
    match &cli.command {
        Command::Energy {
            source,
            tau,
            normalize,
            columns,
        } => {
            let cfg = base(source)?;
            let tau = TauSpec::parse(tau)?;
            cmd_energy(&cfg, &tau, *normalize, columns.as_deref())
        }
        Command::Residual { source, tau, columns } => {
            let cfg = base(source)?;
            let tau = TauSpec::parse(tau)?;
            cmd_residual(&cfg, &tau, columns.as_deref())
        }
        Command::Minimize {
            source,
            init,
            init_random,
            modes,
            method,
            tol,
            max_iter,
            columns,
        } => {
            let cfg = base(source)?.tolerance("gradient", *tol)?;
            let init = match (init, init_random) {
                (Some(e), _) => Init::Expr(TauSpec::parse(e)?),
                (None, Some(s)) => Init::Random(*s),
                (None, None) => Init::Expr(TauSpec::zero()),
            };
            let opts = MinimizeOptions {
                method: method.clone(),
                tol: *tol,
                max_iter: *max_iter,
                ..MinimizeOptions::default()
            };
            cmd_minimize(&cfg, &init, *modes, &opts, columns.as_deref())
        }
        Command::Verify {
            source,
            suite,
            tau,
            samples,
            tol,
        } => {
            let mut cfg = base(source)?;
            if let Some(t) = tol {
                cfg = cfg.tolerance("suite", *t)?;
            }
            let tau = tau.as_deref().map(TauSpec::parse).transpose()?;
            cmd_verify(&cfg, suite, tau.as_ref(), *samples)
        }
        Command::GenData { source } => cmd_gen_data(&base(source)?),
    }
}

pub fn cmd_energy(cfg: &RunConfig, tau: &TauSpec, normalize: bool, columns: Option<&Path>) -> Result<Outcome> {
    let d = cfg.physical_data()?;
    let grid = d.grid().clone();
    let t = tau.field(&grid)?;
    let energy = qle(&d, &t)?;
    let literal = qle_literal(&d, &t)?;
    let report = EnergyReport {
        meta: cfg.meta("energy", grid.n_nodes(), Some(tau)),
        guard_margin: convexity_guard(&d.metric, &t)?,
        literal_total: literal.total,
        literal_gap: (literal.total - energy.total).abs(),
        total_over_8pi: normalize.then(|| energy.total / (8.0 * std::f64::consts::PI)),
        energy,
    };
    if let Some(p) = columns {
        write_columns(p, &["theta", "tau", "normH"], &grid, &[&t, &d.norm_h])?;
    }
    cfg.emit(&report)?;
    Ok(Outcome::Pass)
}

pub fn cmd_residual(cfg: &RunConfig, tau: &TauSpec, columns: Option<&Path>) -> Result<Outcome> {
    let d = cfg.physical_data()?;
    let grid = d.grid().clone();
    let t = tau.field(&grid)?;
    let r = residual(&d, &t)?;
    let report = ResidualReport {
        meta: cfg.meta("residual", grid.n_nodes(), Some(tau)),
        l2_norm: d.metric.integrate_surface(&r.powi(2))?.sqrt(),
        max_abs: r.max_abs(),
        integral: d.metric.integrate_surface(&r)?,
    };
    if let Some(p) = columns {
        write_columns(p, &["theta", "residual"], &grid, &[&r])?;
    }
    cfg.emit(&report)?;
    Ok(Outcome::Pass)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    Expr(TauSpec),
    /// Coefficients of `P_1..P_modes` uniform in `[−scale, scale]`.
    Random(f64),
}

pub fn cmd_minimize(
    cfg: &RunConfig,
    init: &Init,
    modes: usize,
    opts: &MinimizeOptions,
    columns: Option<&Path>,
) -> Result<Outcome> {
    let d = cfg.physical_data()?;
    let grid = d.grid().clone();
    let (field, tau_meta) = match init {
        Init::Expr(e) => (e.field(&grid)?, e.to_string()),
        Init::Random(scale) => {
            if !(*scale >= 0.0 && scale.is_finite()) {
                return Err(Error::param("init-random", format!("scale must be nonnegative, got {scale}")));
            }
            let f = Sampler::new(grid.clone(), cfg.seed).legendre_box(modes, *scale);
            (f, format!("random scale={scale}"))
        }
    };
    let start = TauCoefficients::from_field(&grid, &field, modes)?;
    let result = minimize_with(&d, &start, opts, &method_registry())?;
    if let Some(p) = columns {
        let star = result.tau_star.to_field(&grid);
        let r = residual(&d, &star)?;
        write_columns(p, &["theta", "tau_star", "residual"], &grid, &[&star, &r])?;
    }
    let mut meta = cfg.meta("minimize", grid.n_nodes(), None);
    meta.tau = Some(format!("init {tau_meta}"));
    cfg.emit(&MinimizeOutput { meta, result })?;
    Ok(Outcome::Pass)
}

pub fn cmd_verify(cfg: &RunConfig, suites: &[String], tau: Option<&TauSpec>, samples: usize) -> Result<Outcome> {
    let registry = suite_registry();
    let names: Vec<String> = if suites.iter().any(|s| s == "all") {
        registry.names().into_iter().map(String::from).collect()
    } else {
        suites.to_vec()
    };
    let (metric, data) = cfg.resolve()?;
    let grid = metric.grid().clone();
    let input = SuiteInput {
        tau: tau.map(|t| t.field(&grid)).transpose()?,
        metric,
        data,
        seed: cfg.seed,
        samples,
        tolerance: cfg.tolerances.get("suite").copied(),
    };
    let mut reports = Vec::with_capacity(names.len());
    for name in &names {
        let report = registry.get(name)?.run(&input)?;
        eprintln!(
            "{:<10} {}  worst margin {:+.3e}",
            report.name,
            if report.pass { "PASS" } else { "FAIL" },
            report.worst_margin
        );
        reports.push(report);
    }
    let pass = reports.iter().all(|r| r.pass);
    let report = VerifyReport {
        meta: cfg.meta("verify", grid.n_nodes(), tau),
        pass,
        suites: reports,
    };
    cfg.emit(&report)?;
    Ok(if pass { Outcome::Pass } else { Outcome::Fail })
}

pub fn cmd_gen_data(cfg: &RunConfig) -> Result<Outcome> {
    let d = cfg.physical_data()?;
    match &cfg.out {
        Some(p) => {
            let mut f = io::BufWriter::new(fs::File::create(p)?);
            write_table(&d, &mut f)?;
            f.flush()?;
        }
        None => write_table(&d, &mut io::stdout().lock())?,
    }
    Ok(Outcome::Pass)
}

/// Entry point for the binary.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(2),
        // Reader went away (e.g. `| head`).
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
