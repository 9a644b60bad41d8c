//! `tailsep` command-line interface.
//!
//! ## Purpose
//! Exposes the library as six subcommands over headered CSV files: tail
//! hypothesis tests (`test`), tail-model MLE fitting (`fit`), Q-Q tables
//! (`qq`), Monte-Carlo rejection curves (`simulate`), tail-ordering grid
//! checks (`check-separability`) and baseline critical values (`calibrate`).
//!
//! ## Conventions
//! - Exit codes: 0 success, 2 invalid input or parameters (including usage
//!   errors from argument parsing), 3 numerical non-convergence.
//! - Outputs are UTF-8 CSV or JSON. CSV floats use `.` as decimal separator
//!   at full double precision (17 significant digits).

mod commands;
mod io;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tailsep::{Error, Side};

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Test(args) => commands::cmd_test(args),
        Command::Fit(args) => commands::cmd_fit(args),
        Command::Qq(args) => commands::cmd_qq(args),
        Command::Simulate(args) => commands::cmd_simulate(args),
        Command::CheckSeparability(args) => commands::cmd_check_separability(args),
        Command::Calibrate(args) => commands::cmd_calibrate(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(match e {
            Error::NonConvergence(_) => 3,
            Error::InvalidParameter(_) | Error::InvalidInput(_) => 2,
        });
    }
}

#[derive(Parser)]
#[command(
    name = "tailsep",
    version,
    about = "Location/scale-free hypothesis tests separating Weibull-type, \
             log-Weibull-type and regularly-varying distribution tails"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test one data column against a separating null distribution
    Test(TestArgs),
    /// Fit exponential, two-parameter Weibull and GPD models to exceedances
    Fit(FitArgs),
    /// Tabulate empirical and fitted quantiles against exponential quantiles
    Qq(QqArgs),
    /// Estimate a rejection-rate curve over a k-grid by Monte Carlo
    Simulate(SimulateArgs),
    /// Grid-check a tail-ordering condition between two laws
    CheckSeparability(CheckArgs),
    /// Tabulate Monte-Carlo critical values of a baseline statistic under
    /// Exp(1)
    Calibrate(CalibrateArgs),
}

// ---------------------------------------------------------------------------
// Flag vocabularies
// ---------------------------------------------------------------------------

/// Output encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Rejection direction.
#[derive(Debug, Clone, Copy, ValueEnum)]
enum CliSide {
    /// Reject for large scores (alternative heavier-tailed than the null).
    Right,
    /// Reject for small scores (alternative lighter-tailed than the null).
    Left,
}

impl From<CliSide> for Side {
    fn from(side: CliSide) -> Side {
        match side {
            CliSide::Right => Side::Right,
            CliSide::Left => Side::Left,
        }
    }
}

/// Statistic run by `test`.
#[derive(Debug, Clone, Copy, ValueEnum)]
enum Statistic {
    /// Mean log-survival exceedance under the null cdf itself (no
    /// normalization; use when the data are calibrated to the null's scale).
    Plain,
    /// Scale-free statistic: invariant under X → cX.
    ScaleFree,
    /// Location-scale-free statistic: invariant under X → aX + b.
    LocationScaleFree,
}

/// Test evaluated by `simulate` at each k.
#[derive(Debug, Clone, Copy, ValueEnum)]
enum SimStatistic {
    ScaleFree,
    LocationScaleFree,
    /// Hasofer-Wang baseline (calibrated internally under Exp(1)).
    HasoferWang,
    /// Maximum-to-mean exceedance ratio baseline (calibrated internally).
    Ratio,
}

impl From<SimStatistic> for tailsep::harness::TestKind {
    fn from(s: SimStatistic) -> tailsep::harness::TestKind {
        use tailsep::harness::TestKind;
        match s {
            SimStatistic::ScaleFree => TestKind::ScaleFree,
            SimStatistic::LocationScaleFree => TestKind::LocationScaleFree,
            SimStatistic::HasoferWang => TestKind::HasoferWang,
            SimStatistic::Ratio => TestKind::Ratio,
        }
    }
}

/// Separating-null family.
#[derive(Debug, Clone, Copy, ValueEnum)]
enum F0Family {
    /// Separates Weibull-type from log-Weibull-type tails (shape b).
    WeibullLogweibull,
    /// Separates log-Weibull-type from regularly-varying tails (shape b).
    LogweibullRv,
    /// Pareto null with tail index --gamma (quantile t^gamma).
    Pareto,
    /// Standard exponential null (quantile ln t).
    Exponential,
}

/// Baseline statistic to calibrate.
#[derive(Debug, Clone, Copy, ValueEnum)]
enum Baseline {
    HasoferWang,
    Ratio,
}

/// Which models `fit` reports.
#[derive(Debug, Clone, Copy, ValueEnum)]
enum FitWhich {
    Exponential,
    Weibull2,
    Gpd,
    All,
}

/// Ordering condition checked by `check-separability`.
#[derive(Debug, Clone, Copy, ValueEnum)]
enum Condition {
    /// Quantile-ratio condition: u_lighter(c^(1+delta) t)/u_heavier(c t)
    /// must not exceed u_lighter(t)/u_heavier(t).
    Quantile,
    /// Survival-function bound implied by the quantile condition.
    Survival,
    /// Monotone survival-ratio condition at a fixed epsilon.
    B,
}

/// Canned `simulate` protocols.
#[derive(Debug, Clone, Copy, ValueEnum)]
enum Preset {
    /// Quick smoke run: exponential data against the exponential null,
    /// scale-free test, n=2000, m=200.
    Desk,
    /// Type-I error curve: Weibull(2/3) data against the
    /// weibull-logweibull null (b=3.5), location-scale-free test, n=5000.
    TypeI,
    /// Power curve: lognormal(0,1) data against the weibull-logweibull
    /// null (b=3.5), location-scale-free test, n=5000.
    Power,
}

// ---------------------------------------------------------------------------
// Shared flag groups
// ---------------------------------------------------------------------------

#[derive(Args)]
struct InputArgs {
    /// Headered CSV file to read
    #[arg(long)]
    input: PathBuf,
    /// Column selector: header name, or 0-based index when no header matches
    #[arg(long)]
    column: String,
}

#[derive(Args)]
struct OutArgs {
    /// Write here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format [default: json for test/fit/check-separability, csv
    /// for qq/simulate/calibrate]
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct NullArgs {
    /// Separating null family [default: weibull-logweibull]
    #[arg(long = "f0", value_enum)]
    f0: Option<F0Family>,
    /// Shape b of the weibull-logweibull / logweibull-rv families
    /// [default: 1.8 / 0.6]
    #[arg(long)]
    b: Option<f64>,
    /// Tail index of the pareto null; on other families, overrides the
    /// gamma entering the score variance
    #[arg(long)]
    gamma: Option<f64>,
}

// ---------------------------------------------------------------------------
// Per-subcommand arguments
// ---------------------------------------------------------------------------

#[derive(Args)]
struct TestArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Which tail statistic to standardize and test
    #[arg(long, value_enum, default_value_t = Statistic::ScaleFree)]
    statistic: Statistic,
    #[command(flatten)]
    null: NullArgs,
    /// Number of top order statistics entering the statistic
    #[arg(long)]
    k: usize,
    /// Significance level in (0, 1)
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Rejection side
    #[arg(long, value_enum, default_value_t = CliSide::Right)]
    side: CliSide,
    /// Population size n when the file holds only the top observations of a
    /// larger population
    #[arg(long)]
    population_n: Option<usize>,
    /// Population threshold X(n-k); only with --population-n, and required
    /// exactly when k equals the number of rows
    #[arg(long)]
    threshold: Option<f64>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Keep values strictly above this threshold and subtract it before
    /// fitting
    #[arg(long)]
    threshold: Option<f64>,
    /// Model to fit
    #[arg(long, value_enum, default_value_t = FitWhich::All)]
    model: FitWhich,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct QqArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Keep values strictly above this threshold and subtract it first
    #[arg(long)]
    threshold: Option<f64>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct SimulateArgs {
    /// Canned protocol; explicit flags override its fields
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Sampling distribution as JSON, e.g.
    /// '{"family":"lognormal","mu":0.0,"sigma":1.0}'
    #[arg(long, conflicts_with = "from_null")]
    distribution: Option<String>,
    /// Sample from the separating null itself (exact-null calibration)
    #[arg(long)]
    from_null: bool,
    /// Test evaluated at each k [default: scale-free]
    #[arg(long, value_enum)]
    statistic: Option<SimStatistic>,
    #[command(flatten)]
    null: NullArgs,
    /// Sample size per replication [default: 5000]
    #[arg(long)]
    n: Option<usize>,
    /// Monte-Carlo replications [default: 1000]
    #[arg(long)]
    m: Option<usize>,
    /// Significance level in (0, 1]; 1 is the degenerate always-reject level
    #[arg(long)]
    alpha: Option<f64>,
    /// k values as "lo:step:hi" or a comma-separated list
    /// [default: 10:10:1000]
    #[arg(long)]
    k_grid: Option<String>,
    /// Rejection side [default: right]
    #[arg(long, value_enum)]
    side: Option<CliSide>,
    /// RNG seed; replication r draws from stream r [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct CheckArgs {
    /// Law claimed lighter-tailed: distribution JSON, or "f0" for the
    /// configured separating null
    #[arg(long)]
    lighter: String,
    /// Law claimed heavier-tailed: distribution JSON, or "f0"
    #[arg(long)]
    heavier: String,
    #[command(flatten)]
    null: NullArgs,
    /// Which ordering condition to check
    #[arg(long, value_enum, default_value_t = Condition::Quantile)]
    condition: Condition,
    /// Tail-time slack delta >= 0 for the quantile/survival conditions
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    /// Epsilon in [0, 1) for the b condition [default: delta/(1+delta)]
    #[arg(long)]
    epsilon: Option<f64>,
    /// Tail times as "lo:hi:points", log-spaced [default: 1e2:1e10:40]
    #[arg(long)]
    t_grid: Option<String>,
    /// Quantile-ratio probes c as "lo:hi:points", log-spaced
    /// [default: 40 points from 10^0.075 to 1e3]
    #[arg(long)]
    c_grid: Option<String>,
    /// Evaluation grid for the b condition, "lo:hi:points", log-spaced
    /// [default: 1:1e4:50]
    #[arg(long)]
    x_grid: Option<String>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct CalibrateArgs {
    /// Baseline statistic to calibrate
    #[arg(long, value_enum)]
    baseline: Baseline,
    /// Exp(1) sample size per replication
    #[arg(long, default_value_t = 2000)]
    n: usize,
    /// Replications (at least 1000)
    #[arg(long, default_value_t = 2000)]
    m: usize,
    /// Significance level(s), comma-separated or repeated
    #[arg(long = "alpha", value_delimiter = ',', num_args = 1.., default_values_t = vec![0.05])]
    alpha: Vec<f64>,
    /// k values as "lo:step:hi" or a comma-separated list
    /// [default: 10:10:1000]
    #[arg(long)]
    k_grid: Option<String>,
    /// RNG seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutArgs,
}
