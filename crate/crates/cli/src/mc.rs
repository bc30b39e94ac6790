//! Monte Carlo coverage studies and reproduction of the interval-length
//! tables.

use dagum_ci_core::ci::{reduction_pct, shortest_interval, standard_interval};
use dagum_ci_core::estimator::{fit_dagum_mle, fit_dagum_quantiles, sample_quantile_ratio};
use dagum_ci_core::{ratio_of_quantiles, ConfidenceInterval, DagumParams, Error, RatioEstimate, RatioSpec};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Shapes `a` used in the reference tables.
pub const TABLE_A_VALUES: [f64; 3] = [0.1, 0.5, 1.0];
/// Observed ratios `r*` used in the reference tables.
pub const TABLE_R_VALUES: [f64; 5] = [2.0, 3.0, 4.0, 5.0, 6.0];

/// A report is flagged invalid when more than this share of replicates
/// failed to produce an interval.
pub const MAX_FAILURE_SHARE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Standard,
    Shortest,
}

impl Method {
    pub fn interval(self, est: &RatioEstimate, level: f64) -> dagum_ci_core::Result<ConfidenceInterval> {
        match self {
            Method::Standard => standard_interval(est, level),
            Method::Shortest => shortest_interval(est, level),
        }
    }
}

/// Whether the shape `a` fed to the interval is the true one or estimated
/// from each simulated sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AMode {
    Known,
    Estimated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AEstimator {
    #[default]
    Mle,
    Quantile,
}

impl AEstimator {
    pub fn fit(self, data: &[f64]) -> dagum_ci_core::Result<DagumParams> {
        match self {
            AEstimator::Mle => fit_dagum_mle(data).map(|f| f.params),
            AEstimator::Quantile => fit_dagum_quantiles(data),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig {
    pub params: DagumParams,
    pub spec: RatioSpec,
    pub n: usize,
    pub level: f64,
    pub replicates: usize,
    pub seed: u64,
    pub method: Method,
    pub a_mode: AMode,
    /// Only used with [`AMode::Estimated`].
    pub estimator: AEstimator,
    /// Worker threads; `None` uses the global rayon pool. Results do not
    /// depend on this.
    pub threads: Option<usize>,
}

impl SimulationConfig {
    pub fn validate(&self) -> dagum_ci_core::Result<()> {
        if self.replicates == 0 {
            return Err(Error::InvalidInput("replicates must be at least 1"));
        }
        if self.n < 10 {
            return Err(Error::InvalidInput("sample size n must be at least 10"));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::Domain { what: "confidence level", value: self.level });
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidInput("threads must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub method: Method,
    /// Share of constructed intervals containing the true ratio.
    pub coverage: f64,
    pub mean_length: f64,
    pub mean_over_risk: f64,
    /// Share of intervals whose upper end is below the true ratio. Its
    /// nominal probability is the interval's `over_risk`.
    pub above_upper: f64,
    /// Share of intervals whose lower end is above the true ratio. Its
    /// nominal probability is the interval's `under_risk`.
    pub below_lower: f64,
    pub replicates: usize,
    pub seed: u64,
    /// Replicates where no interval could be built; excluded from the
    /// coverage denominator.
    pub failures: usize,
    pub true_ratio: f64,
    /// False when failures exceed [`MAX_FAILURE_SHARE`] of the replicates.
    pub valid: bool,
}

#[derive(Debug, Clone, Copy)]
enum Outcome {
    Failed,
    Built { below_lower: bool, above_upper: bool, length: f64, over_risk: f64 },
}

fn replicate(config: &SimulationConfig, true_ratio: f64, index: u64) -> Outcome {
    let attempt = || -> dagum_ci_core::Result<ConfidenceInterval> {
        let data = config.params.sample_stream(config.n, config.seed, index)?;
        let r_star = sample_quantile_ratio(&data, &config.spec)?;
        let a_hat = match config.a_mode {
            AMode::Known => config.params.a(),
            AMode::Estimated => config.estimator.fit(&data)?.a(),
        };
        let est = RatioEstimate::new(r_star, config.n, config.spec, a_hat)?;
        config.method.interval(&est, config.level)
    };
    match attempt() {
        Ok(ci) => Outcome::Built {
            below_lower: true_ratio < ci.lower,
            above_upper: true_ratio > ci.upper,
            length: ci.length,
            over_risk: ci.over_risk,
        },
        Err(_) => Outcome::Failed,
    }
}

/// Runs `config.replicates` independent replicates. Replicate `i` draws its
/// sample from stream `i` of the generator keyed by `config.seed`, and the
/// per-replicate outcomes are reduced in index order, so the report is
/// identical for any thread count.
pub fn run_coverage(config: &SimulationConfig) -> dagum_ci_core::Result<CoverageReport> {
    config.validate()?;
    let true_ratio = ratio_of_quantiles(&config.params, &config.spec);
    let work = || -> Vec<Outcome> {
        (0..config.replicates as u64).into_par_iter().map(|i| replicate(config, true_ratio, i)).collect()
    };
    let outcomes = match config.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|_| Error::InvalidInput("could not start worker threads"))?
            .install(work),
        None => work(),
    };

    let mut failures = 0usize;
    let (mut covered, mut below, mut above) = (0usize, 0usize, 0usize);
    let (mut length_sum, mut risk_sum) = (0.0, 0.0);
    for outcome in &outcomes {
        match *outcome {
            Outcome::Failed => failures += 1,
            Outcome::Built { below_lower, above_upper, length, over_risk } => {
                below += below_lower as usize;
                above += above_upper as usize;
                covered += (!below_lower && !above_upper) as usize;
                length_sum += length;
                risk_sum += over_risk;
            }
        }
    }
    let built = config.replicates - failures;
    let share = |k: usize| if built == 0 { f64::NAN } else { k as f64 / built as f64 };
    Ok(CoverageReport {
        method: config.method,
        coverage: share(covered),
        mean_length: if built == 0 { f64::NAN } else { length_sum / built as f64 },
        mean_over_risk: if built == 0 { f64::NAN } else { risk_sum / built as f64 },
        above_upper: share(above),
        below_lower: share(below),
        replicates: config.replicates,
        seed: config.seed,
        failures,
        true_ratio,
        valid: built > 0 && (failures as f64) <= MAX_FAILURE_SHARE * config.replicates as f64,
    })
}

/// One row of an interval-length table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub a: f64,
    pub r_star: f64,
    /// `δ₁ - δ` of the shortest interval.
    pub over_risk: f64,
    /// `1 - δ₁` of the shortest interval.
    pub under_risk: f64,
    pub short_length: f64,
    pub standard_length: f64,
    pub reduction_pct: f64,
}

/// Shortest and standard interval lengths for every `(a, r*)` pair, in
/// `a`-major order. Purely computational; nothing is sampled.
pub fn reproduce_tables(
    spec: RatioSpec,
    n: usize,
    level: f64,
    a_values: &[f64],
    r_values: &[f64],
) -> dagum_ci_core::Result<Vec<TableRow>> {
    let cells: Vec<(f64, f64)> =
        a_values.iter().flat_map(|&a| r_values.iter().map(move |&r| (a, r))).collect();
    cells
        .into_par_iter()
        .map(|(a, r)| {
            let est = RatioEstimate::new(r, n, spec, a)?;
            let short = shortest_interval(&est, level)?;
            let standard = standard_interval(&est, level)?;
            Ok(TableRow {
                a,
                r_star: r,
                over_risk: short.over_risk,
                under_risk: short.under_risk,
                short_length: short.length,
                standard_length: standard.length,
                reduction_pct: reduction_pct(&short, &standard),
            })
        })
        .collect()
}
