//! Batch front-end: parses a [`RunConfig`], dispatches to the library and
//! renders a deterministic JSON or CSV report.
//!
//! Exit status: 0 on success, 1 when a checked tolerance is exceeded, 2 on
//! any input error.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use wigner_chaos::chaos::{Budget, UNIT_NORM_TOL};
use wigner_chaos::pairings::{count_pairings, MAX_POINTS};
use wigner_chaos::spectral::{inequality_report, InequalityReport, EPSILON_N};
use wigner_chaos::stein::{INEQUALITY_SLACK, MIRROR_TOL};
use wigner_chaos::{
    fourth_moment_deficit, io, moment_oracle, stein_discrepancy_sq, ChaosElement64, ChaosError, GridSpec, Kernel64,
    Preset, SteinReport, DEFAULT_BUDGET,
};

/// Seed used when `--seed` is absent.
pub const DEFAULT_SEED: u64 = 42;

/// Environment variable overriding the entry budget of the chaos algebra.
pub const BUDGET_ENV: &str = "WIGNER_BUDGET";

/// Agreement required between the product formula and the pairing oracle,
/// and between `τ(F⁴) − 2` and the contraction form of the deficit.
pub const ORACLE_TOL: f64 = 1e-10;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Chaos(#[from] ChaosError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Parser)]
#[command(name = "wigner", version, about = "Wigner chaos calculus and spectral checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,

    /// Number of grid cells (defaults to what the preset needs).
    #[arg(long, global = true)]
    pub cells: Option<usize>,

    /// Width of each grid cell.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub width: f64,

    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Report format (json everywhere; csv for `verify`, its default).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
#[group(required = true, multiple = false)]
pub struct SourceArgs {
    /// Kernel JSON file.
    #[arg(long)]
    pub kernel: Option<PathBuf>,
    /// Named preset such as `diagonal:16`, `basis_power:2`, `random_mirror:3:7`.
    #[arg(long)]
    pub preset: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Count all and non-crossing pairings of a point set.
    Pairings {
        #[arg(long)]
        points: usize,
    },
    /// Moments τ(F^j), j = 1..k, by the product formula and the pairing oracle.
    Moments {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, default_value_t = 4)]
        k: usize,
    },
    /// Fourth-moment deficit τ(F⁴) − 2.
    Deficit {
        #[command(flatten)]
        source: SourceArgs,
    },
    /// Stein discrepancy and its bounds.
    Stein {
        #[command(flatten)]
        source: SourceArgs,
    },
    /// GUE matrix-model simulation and inequality report.
    Simulate {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, default_value_t = 512)]
        dim: usize,
        #[arg(long, default_value_t = 8)]
        trials: usize,
    },
    /// Sweep a kernel family and tabulate the bounds.
    Verify {
        #[arg(long, default_value = "diagonal")]
        family: String,
        #[arg(long, value_delimiter = ',', default_value = "1,4,16,64")]
        ks: Vec<usize>,
        #[arg(long, default_value_t = 512)]
        dim: usize,
        #[arg(long, default_value_t = 8)]
        trials: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq)]
pub enum KernelSource {
    File(PathBuf),
    Preset(Preset),
}

impl KernelSource {
    fn describe(&self) -> String {
        match self {
            Self::File(p) => p.display().to_string(),
            Self::Preset(p) => p.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Pairings { points: usize },
    Moments { source: KernelSource, k: usize },
    Deficit { source: KernelSource },
    Stein { source: KernelSource },
    Simulate { source: KernelSource, dim: usize, trials: usize },
    Verify { family: Family, ks: Vec<usize>, dim: usize, trials: usize },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Pairings { .. } => "pairings",
            Self::Moments { .. } => "moments",
            Self::Deficit { .. } => "deficit",
            Self::Stein { .. } => "stein",
            Self::Simulate { .. } => "simulate",
            Self::Verify { .. } => "verify",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Diagonal,
}

/// Validated run description.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub cells: Option<usize>,
    pub width: f64,
    pub seed: u64,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub budget: Budget,
}

impl RunConfig {
    /// Validates parsed arguments; `budget_env` is the raw value of [`BUDGET_ENV`].
    pub fn from_cli(cli: Cli, budget_env: Option<&str>) -> Result<Self, CliError> {
        let budget = match budget_env {
            None => Budget(DEFAULT_BUDGET),
            Some(v) => match v.trim().parse::<usize>() {
                Ok(b) if b > 0 => Budget(b),
                _ => return Err(CliError::Usage(format!("{BUDGET_ENV} must be a positive integer, got `{v}`"))),
            },
        };
        let source = |s: SourceArgs| -> Result<KernelSource, CliError> {
            match (s.kernel, s.preset) {
                (Some(p), None) => Ok(KernelSource::File(p)),
                (None, Some(name)) => Ok(KernelSource::Preset(name.parse()?)),
                _ => Err(CliError::Usage("give exactly one of --kernel and --preset".into())),
            }
        };
        let command = match cli.command {
            CliCommand::Pairings { points } => Command::Pairings { points },
            CliCommand::Moments { source: s, k } => Command::Moments { source: source(s)?, k },
            CliCommand::Deficit { source: s } => Command::Deficit { source: source(s)? },
            CliCommand::Stein { source: s } => Command::Stein { source: source(s)? },
            CliCommand::Simulate { source: s, dim, trials } => {
                check_trials(trials)?;
                Command::Simulate { source: source(s)?, dim, trials }
            }
            CliCommand::Verify { family, ks, dim, trials } => {
                check_trials(trials)?;
                let family = match family.as_str() {
                    "diagonal" | "diagonal_family" => Family::Diagonal,
                    other => return Err(CliError::Usage(format!("unknown family `{other}`"))),
                };
                if ks.is_empty() || ks.contains(&0) {
                    return Err(CliError::Usage("--ks needs positive integers".into()));
                }
                Command::Verify { family, ks, dim, trials }
            }
        };
        let format = match (cli.format, &command) {
            (None, Command::Verify { .. }) => Format::Csv,
            (None, _) => Format::Json,
            (Some(Format::Csv), c) if !matches!(c, Command::Verify { .. }) => {
                return Err(CliError::Usage(format!("csv output is only available for verify, not {}", c.name())))
            }
            (Some(f), _) => f,
        };
        if cli.cells == Some(0) {
            return Err(CliError::Usage("--cells must be positive".into()));
        }
        Ok(Self { command, cells: cli.cells, width: cli.width, seed: cli.seed, format, output: cli.output, budget })
    }
}

fn check_trials(trials: usize) -> Result<(), CliError> {
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    Ok(())
}

/// Rendered report and whether a tolerance was exceeded.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub body: String,
    pub violation: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.violation {
            EXIT_VIOLATION
        } else {
            EXIT_OK
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Tolerances {
    pub unit_norm: f64,
    pub mirror: f64,
    pub oracle: f64,
    pub inequality_slack: f64,
    pub epsilon_n: f64,
}

pub const TOLERANCES: Tolerances = Tolerances {
    unit_norm: UNIT_NORM_TOL,
    mirror: MIRROR_TOL,
    oracle: ORACLE_TOL,
    inequality_slack: INEQUALITY_SLACK,
    epsilon_n: EPSILON_N,
};

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    pub budget: usize,
    pub tolerances: Tolerances,
}

#[derive(Debug, Serialize)]
pub struct PairingsReport {
    pub all: u64,
    pub noncrossing: u64,
    pub points: usize,
    pub provenance: Provenance,
}

#[derive(Debug, Serialize)]
pub struct MomentRow {
    pub k: usize,
    pub value: f64,
    pub imag: f64,
    /// Pairing-oracle value; absent above the enumeration guard.
    pub oracle: Option<f64>,
    pub abs_diff: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct MomentsReport {
    pub order: usize,
    pub moments: Vec<MomentRow>,
    pub violation: bool,
    pub provenance: Provenance,
}

#[derive(Debug, Serialize)]
pub struct DeficitReport {
    pub deficit: f64,
    pub order: usize,
    pub fourth_moment: f64,
    /// `|τ(F⁴) − 2 − deficit|`.
    pub identity_gap: f64,
    pub violation: bool,
    pub provenance: Provenance,
}

#[derive(Debug, Serialize)]
pub struct SteinCommandReport {
    #[serde(flatten)]
    pub report: SteinReport,
    pub bounds_hold: bool,
    pub violation: bool,
    pub provenance: Provenance,
}

#[derive(Debug, Serialize)]
pub struct SimulateReport {
    #[serde(flatten)]
    pub report: InequalityReport,
    pub provenance: Provenance,
}

/// One row of the `verify` sweep; the first seven columns are the table.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyRow {
    pub k: usize,
    pub deficit: f64,
    pub delta_sq: f64,
    pub theorem_rhs: f64,
    pub w2_est: f64,
    pub w2_spread: f64,
    pub entropy_est: f64,
    pub cells: usize,
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    pub epsilon_n: f64,
    pub violation: bool,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub family: Family,
    pub rows: Vec<VerifyRow>,
    pub violation: bool,
    pub provenance: Provenance,
}

impl RunConfig {
    fn provenance(&self) -> Provenance {
        Provenance {
            tool: "wigner",
            version: env!("CARGO_PKG_VERSION"),
            command: self.command.name(),
            source: None,
            grid: None,
            seed: None,
            dim: None,
            trials: None,
            budget: self.budget.0,
            tolerances: TOLERANCES,
        }
    }

    fn load(&self, source: &KernelSource) -> Result<Kernel64, CliError> {
        match source {
            KernelSource::File(path) => {
                let f: Kernel64 = io::read_kernel(path)?;
                if let Some(c) = self.cells {
                    if c != f.grid().cells() {
                        return Err(CliError::Usage(format!(
                            "--cells {c} conflicts with the {} cells in {}",
                            f.grid().cells(),
                            path.display()
                        )));
                    }
                }
                Ok(f)
            }
            KernelSource::Preset(p) => {
                let grid = GridSpec::new(self.cells.unwrap_or_else(|| p.min_cells()), self.width)?;
                Ok(p.build(grid)?)
            }
        }
    }

    fn kernel_provenance(&self, source: &KernelSource, f: &Kernel64) -> Provenance {
        Provenance { source: Some(source.describe()), grid: Some(*f.grid()), ..self.provenance() }
    }
}

/// Executes the command and renders its report.
pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    match &config.command {
        Command::Pairings { points } => {
            if *points > MAX_POINTS {
                return Err(ChaosError::SizeGuard { points: *points, guard: MAX_POINTS }.into());
            }
            let report = PairingsReport {
                all: count_pairings(*points, false)?,
                noncrossing: count_pairings(*points, true)?,
                points: *points,
                provenance: config.provenance(),
            };
            json(&report, false)
        }
        Command::Moments { source, k } => {
            let f = config.load(source)?;
            let big_f = ChaosElement64::from_kernel(f.clone());
            let mut rows = Vec::with_capacity(*k);
            for j in 1..=*k {
                let m = big_f.moment_with_budget(j, config.budget)?;
                let oracle = if f.order() * j <= MAX_POINTS { Some(moment_oracle(&vec![f.clone(); j])?) } else { None };
                rows.push(MomentRow {
                    k: j,
                    value: m.re,
                    imag: m.im,
                    oracle: oracle.map(|o| o.re),
                    abs_diff: oracle.map(|o| (o - m).norm()),
                });
            }
            let violation = rows.iter().any(|r| r.abs_diff.is_some_and(|d| d > ORACLE_TOL * r.value.abs().max(1.0)));
            let report = MomentsReport {
                order: f.order(),
                moments: rows,
                violation,
                provenance: config.kernel_provenance(source, &f),
            };
            json(&report, violation)
        }
        Command::Deficit { source } => {
            let f = config.load(source)?;
            let deficit = fourth_moment_deficit(&f)?;
            let fourth = ChaosElement64::from_kernel(f.clone()).moment_with_budget(4, config.budget)?.re;
            let gap = (fourth - 2.0 - deficit).abs();
            let violation = gap > ORACLE_TOL * fourth.abs().max(1.0);
            let report = DeficitReport {
                deficit,
                order: f.order(),
                fourth_moment: fourth,
                identity_gap: gap,
                violation,
                provenance: config.kernel_provenance(source, &f),
            };
            json(&report, violation)
        }
        Command::Stein { source } => {
            let f = config.load(source)?;
            let report = stein_discrepancy_sq(&f)?;
            let bounds_hold = report.bounds_hold(INEQUALITY_SLACK);
            let out = SteinCommandReport {
                report,
                bounds_hold,
                violation: !bounds_hold,
                provenance: config.kernel_provenance(source, &f),
            };
            json(&out, !bounds_hold)
        }
        Command::Simulate { source, dim, trials } => {
            let f = config.load(source)?;
            let report = inequality_report(&f, *dim, *trials, config.seed)?;
            let violation = report.violation;
            let provenance = Provenance {
                seed: Some(config.seed),
                dim: Some(*dim),
                trials: Some(*trials),
                ..config.kernel_provenance(source, &f)
            };
            json(&SimulateReport { report, provenance }, violation)
        }
        Command::Verify { family, ks, dim, trials } => {
            let rows =
                ks.iter().map(|&k| verify_row(config, *family, k, *dim, *trials)).collect::<Result<Vec<_>, _>>()?;
            let violation = rows.iter().any(|r| r.violation);
            match config.format {
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    for r in &rows {
                        w.serialize(r)?;
                    }
                    let body =
                        String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv output is UTF-8");
                    Ok(Outcome { body, violation })
                }
                Format::Json => {
                    let provenance = Provenance {
                        seed: Some(config.seed),
                        dim: Some(*dim),
                        trials: Some(*trials),
                        ..config.provenance()
                    };
                    json(&VerifyReport { family: *family, rows, violation, provenance }, violation)
                }
            }
        }
    }
}

fn verify_row(config: &RunConfig, family: Family, k: usize, dim: usize, trials: usize) -> Result<VerifyRow, CliError> {
    let Family::Diagonal = family;
    let cells = config.cells.unwrap_or(k);
    let f: Kernel64 = Preset::DiagonalFamily { k }.build(GridSpec::new(cells, config.width)?)?;
    let r = inequality_report(&f, dim, trials, config.seed)?;
    Ok(VerifyRow {
        k,
        deficit: r.deficit,
        delta_sq: r.delta_sq,
        theorem_rhs: r.theorem_rhs,
        w2_est: r.w2_est,
        w2_spread: r.w2_spread,
        entropy_est: r.entropy_est,
        cells,
        dim,
        trials,
        seed: config.seed,
        epsilon_n: r.epsilon_n,
        violation: r.violation,
    })
}

fn json<T: Serialize>(report: &T, violation: bool) -> Result<Outcome, CliError> {
    let mut body = serde_json::to_string_pretty(report)?;
    body.push('\n');
    Ok(Outcome { body, violation })
}

/// Full pipeline for `main`: returns the exit status after writing the
/// report (or an error message on stderr).
pub fn execute(cli: Cli, budget_env: Option<&str>) -> i32 {
    let result = RunConfig::from_cli(cli, budget_env).and_then(|config| {
        let outcome = run(&config)?;
        match &config.output {
            Some(path) => std::fs::write(path, &outcome.body)?,
            None => print!("{}", outcome.body),
        }
        Ok(outcome)
    });
    match result {
        Ok(outcome) => outcome.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}
