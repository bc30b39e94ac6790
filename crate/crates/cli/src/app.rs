//! Argument parsing and command dispatch, kept apart from `main` so the
//! whole tool can be driven from tests with in-memory writers.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dagum_ci_core::ci::{reduction_pct, shortest_interval, standard_interval};
use dagum_ci_core::estimator::fit_dagum_mle;
use dagum_ci_core::{DagumParams, Error, RatioEstimate, RatioSpec};

use crate::data::{read_incomes, DataError, ReadOptions};
use crate::mc::{self, AEstimator, AMode, Method, SimulationConfig};
use crate::output::{
    CoverageRecord, FitRecord, Format, IntervalOut, IntervalRecord, OutputRecord, ParamsOut, SampleRecord,
    ShapeSource, TableRecord,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "dagum-ci", version, about = "Confidence intervals for Dagum quantile ratios")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Intervals for a given estimate r* and shape a.
    Ci(CiArgs),
    /// Intervals computed from an income file.
    Estimate(EstimateArgs),
    /// Interval-length tables over a grid of (a, r*).
    Table(TableArgs),
    /// Monte Carlo coverage study.
    Simulate(SimulateArgs),
    /// Maximum likelihood fit of a Dagum law to an income file.
    Fit(DataArgs),
    /// Draw a Dagum sample.
    Sample(SampleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Both,
    Standard,
    Shortest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableKind {
    /// Quintile orders 0.2 and 0.8.
    T1,
    /// Decile orders 0.1 and 0.9.
    T2,
    /// Orders given by --alpha and --beta.
    Custom,
}

#[derive(Debug, Args)]
struct Orders {
    #[arg(long, default_value_t = 0.2)]
    alpha: f64,
    #[arg(long, default_value_t = 0.8)]
    beta: f64,
}

#[derive(Debug, Args)]
struct CiArgs {
    #[command(flatten)]
    orders: Orders,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Estimated quantile ratio.
    #[arg(long = "r", default_value_t = 2.5)]
    r_star: f64,
    /// Shape parameter a.
    #[arg(long, default_value_t = 0.1)]
    a: f64,
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    #[arg(long, value_enum, default_value_t = Mode::Both)]
    mode: Mode,
}

#[derive(Debug, Args)]
struct DataArgs {
    /// Income file, one value per line.
    #[arg(long)]
    file: PathBuf,
    /// Ignore the first non-blank line.
    #[arg(long)]
    skip_header: bool,
    /// 1-based column for comma or whitespace separated files.
    #[arg(long)]
    column: Option<usize>,
}

impl DataArgs {
    fn load(&self) -> Result<Vec<f64>, Failure> {
        let opts = ReadOptions { skip_header: self.skip_header, column: self.column };
        Ok(read_incomes(&self.file, opts)?.values)
    }
}

#[derive(Debug, Args)]
struct EstimateArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    orders: Orders,
    /// Shape a; estimated by maximum likelihood when omitted.
    #[arg(long)]
    a: Option<f64>,
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    #[arg(long, value_enum, default_value_t = Mode::Both)]
    mode: Mode,
}

#[derive(Debug, Args)]
struct TableArgs {
    #[arg(value_enum)]
    which: TableKind,
    #[arg(long, required_if_eq("which", "custom"))]
    alpha: Option<f64>,
    #[arg(long, required_if_eq("which", "custom"))]
    beta: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 0.95)]
    level: f64,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 0.5)]
    a: f64,
    #[arg(long, default_value_t = 2.0)]
    v: f64,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[command(flatten)]
    orders: Orders,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    #[arg(long, default_value_t = 10_000)]
    replicates: usize,
    /// Required with --format json; generated and reported otherwise.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = MethodArg::Standard)]
    method: MethodArg,
    #[arg(long, value_enum, default_value_t = AModeArg::Known)]
    a_mode: AModeArg,
    #[arg(long, value_enum, default_value_t = EstimatorArg::Mle)]
    estimator: EstimatorArg,
    /// Worker threads; the result does not depend on this.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[arg(long)]
    a: f64,
    #[arg(long)]
    v: f64,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long)]
    count: usize,
    /// Required with --format json; generated otherwise.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Standard,
    Shortest,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AModeArg {
    Known,
    Estimated,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EstimatorArg {
    Mle,
    Quantile,
}

/// A failed command: message plus exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn validation(message: impl Into<String>) -> Self {
        Failure { code: EXIT_VALIDATION, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_validation() { EXIT_VALIDATION } else { EXIT_NUMERICAL };
        Failure { code, message: e.to_string() }
    }
}

impl From<DataError> for Failure {
    fn from(e: DataError) -> Self {
        Failure::validation(e.to_string())
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to `err` as a single line.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{}", e.render());
                return EXIT_OK;
            }
            let rendered = e.render().to_string();
            let line = rendered.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
            let _ = writeln!(err, "{}", line.trim());
            return EXIT_VALIDATION;
        }
    };
    let result = dispatch(&cli).and_then(|(record, note)| {
        if let Some(note) = note {
            let _ = writeln!(err, "{note}");
        }
        record
            .write(cli.format, out)
            .map_err(|e| Failure { code: 1, message: format!("cannot write output: {e}") })
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message.replace('\n', " "));
            f.code
        }
    }
}

type Dispatched = (OutputRecord, Option<String>);

fn dispatch(cli: &Cli) -> Result<Dispatched, Failure> {
    match &cli.command {
        Command::Ci(args) => cmd_ci(args).map(|r| (r, None)),
        Command::Estimate(args) => cmd_estimate(args).map(|r| (r, None)),
        Command::Table(args) => cmd_table(args).map(|r| (r, None)),
        Command::Simulate(args) => cmd_simulate(args, cli.format),
        Command::Fit(args) => cmd_fit(args).map(|r| (r, None)),
        Command::Sample(args) => cmd_sample(args, cli.format),
    }
}

fn intervals(
    est: &RatioEstimate,
    level: f64,
    mode: Mode,
    a_source: ShapeSource,
    fit: Option<ParamsOut>,
) -> Result<OutputRecord, Failure> {
    let standard = match mode {
        Mode::Both | Mode::Standard => Some(standard_interval(est, level)?),
        Mode::Shortest => None,
    };
    let shortest = match mode {
        Mode::Both | Mode::Shortest => Some(shortest_interval(est, level)?),
        Mode::Standard => None,
    };
    let reduction = match (&shortest, &standard) {
        (Some(s), Some(t)) if t.length.is_finite() => Some(reduction_pct(s, t)),
        _ => None,
    };
    Ok(OutputRecord::Interval(IntervalRecord {
        alpha: est.spec.alpha(),
        beta: est.spec.beta(),
        n: est.n,
        r_star: est.r_star,
        a: est.a_hat,
        a_source,
        level,
        standard: standard.as_ref().map(IntervalOut::from),
        shortest: shortest.as_ref().map(IntervalOut::from),
        reduction_pct: reduction,
        fit,
    }))
}

fn cmd_ci(args: &CiArgs) -> Result<OutputRecord, Failure> {
    let spec = RatioSpec::new(args.orders.alpha, args.orders.beta)?;
    let est = RatioEstimate::new(args.r_star, args.n, spec, args.a)?;
    intervals(&est, args.level, args.mode, ShapeSource::Given, None)
}

fn cmd_estimate(args: &EstimateArgs) -> Result<OutputRecord, Failure> {
    let spec = RatioSpec::new(args.orders.alpha, args.orders.beta)?;
    let data = args.data.load()?;
    let (a, source, fit) = match args.a {
        Some(a) => (a, ShapeSource::Given, None),
        None => {
            let fit = fit_dagum_mle(&data)?;
            (fit.params.a(), ShapeSource::Mle, Some(ParamsOut::from(&fit.params)))
        }
    };
    let est = RatioEstimate::from_data(&data, spec, a)?;
    intervals(&est, args.level, args.mode, source, fit)
}

fn cmd_table(args: &TableArgs) -> Result<OutputRecord, Failure> {
    let spec = match args.which {
        TableKind::T1 => RatioSpec::QUINTILE,
        TableKind::T2 => RatioSpec::DECILE,
        TableKind::Custom => match (args.alpha, args.beta) {
            (Some(a), Some(b)) => RatioSpec::new(a, b)?,
            _ => return Err(Failure::validation("custom tables need --alpha and --beta")),
        },
    };
    if args.which != TableKind::Custom && (args.alpha.is_some() || args.beta.is_some()) {
        return Err(Failure::validation("--alpha and --beta only apply to custom tables"));
    }
    let rows = mc::reproduce_tables(spec, args.n, args.level, &mc::TABLE_A_VALUES, &mc::TABLE_R_VALUES)?;
    Ok(OutputRecord::Table(TableRecord {
        alpha: spec.alpha(),
        beta: spec.beta(),
        n: args.n,
        level: args.level,
        rows,
    }))
}

/// Seed for table-format runs that did not pass one; it is always reported.
fn fresh_seed() -> u64 {
    let nanos = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_nanos() as u64);
    // splitmix64 finaliser, mixing in the process id.
    let mut z = nanos ^ ((std::process::id() as u64) << 32);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn resolve_seed(seed: Option<u64>, format: Format) -> Result<(u64, Option<String>), Failure> {
    match (seed, format) {
        (Some(s), _) => Ok((s, None)),
        (None, Format::Json) => Err(Failure::validation("--seed is required with --format json")),
        (None, Format::Table) => {
            let s = fresh_seed();
            Ok((s, Some(format!("note: no --seed given, using {s}"))))
        }
    }
}

fn cmd_simulate(args: &SimulateArgs, format: Format) -> Result<Dispatched, Failure> {
    let (seed, note) = resolve_seed(args.seed, format)?;
    let params = DagumParams::new(args.a, args.v, args.lambda)?;
    let spec = RatioSpec::new(args.orders.alpha, args.orders.beta)?;
    let config = SimulationConfig {
        params,
        spec,
        n: args.n,
        level: args.level,
        replicates: args.replicates,
        seed,
        method: match args.method {
            MethodArg::Standard => Method::Standard,
            MethodArg::Shortest => Method::Shortest,
        },
        a_mode: match args.a_mode {
            AModeArg::Known => AMode::Known,
            AModeArg::Estimated => AMode::Estimated,
        },
        estimator: match args.estimator {
            EstimatorArg::Mle => AEstimator::Mle,
            EstimatorArg::Quantile => AEstimator::Quantile,
        },
        threads: args.threads,
    };
    let report = mc::run_coverage(&config)?;
    let record = OutputRecord::Coverage(CoverageRecord {
        params: ParamsOut::from(&params),
        alpha: spec.alpha(),
        beta: spec.beta(),
        n: args.n,
        level: args.level,
        a_mode: config.a_mode,
        estimator: config.estimator,
        report,
    });
    Ok((record, note))
}

fn cmd_fit(args: &DataArgs) -> Result<OutputRecord, Failure> {
    let data = args.load()?;
    let fit = fit_dagum_mle(&data)?;
    Ok(OutputRecord::Fit(FitRecord {
        n: data.len(),
        params: ParamsOut::from(&fit.params),
        log_likelihood: fit.log_likelihood,
        iterations: fit.iterations,
    }))
}

fn cmd_sample(args: &SampleArgs, format: Format) -> Result<Dispatched, Failure> {
    let (seed, note) = resolve_seed(args.seed, format)?;
    let params = DagumParams::new(args.a, args.v, args.lambda)?;
    let values = params.sample(args.count, seed)?;
    let record = OutputRecord::Sample(SampleRecord { params: ParamsOut::from(&params), seed, values });
    Ok((record, note))
}
