//! Typed output records and their two renderings.
//!
//! JSON output is a single [`OutputRecord`] tagged by `kind`, and
//! deserializes back into the same value. Unbounded interval ends are
//! written as `null`.

use std::io::{self, Write};

use dagum_ci_core::{ConfidenceInterval, DagumParams};
use serde::{Deserialize, Serialize};

use crate::mc::{AEstimator, AMode, CoverageReport, TableRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OutputRecord {
    Interval(IntervalRecord),
    Table(TableRecord),
    Coverage(CoverageRecord),
    Fit(FitRecord),
    Sample(SampleRecord),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeSource {
    Given,
    Mle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalRecord {
    pub alpha: f64,
    pub beta: f64,
    pub n: usize,
    pub r_star: f64,
    pub a: f64,
    pub a_source: ShapeSource,
    pub level: f64,
    pub standard: Option<IntervalOut>,
    pub shortest: Option<IntervalOut>,
    /// Present when both intervals were computed.
    pub reduction_pct: Option<f64>,
    /// Fitted parameters when `a` was estimated from data.
    pub fit: Option<ParamsOut>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalOut {
    pub lower: f64,
    /// `None` when the interval is unbounded above.
    pub upper: Option<f64>,
    pub over_risk: f64,
    pub under_risk: f64,
    pub length: Option<f64>,
}

impl From<&ConfidenceInterval> for IntervalOut {
    fn from(ci: &ConfidenceInterval) -> Self {
        let finite = |x: f64| x.is_finite().then_some(x);
        IntervalOut {
            lower: ci.lower,
            upper: finite(ci.upper),
            over_risk: ci.over_risk,
            under_risk: ci.under_risk,
            length: finite(ci.length),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamsOut {
    pub a: f64,
    pub v: f64,
    pub lambda: f64,
}

impl From<&DagumParams> for ParamsOut {
    fn from(p: &DagumParams) -> Self {
        ParamsOut { a: p.a(), v: p.v(), lambda: p.lambda() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRecord {
    pub alpha: f64,
    pub beta: f64,
    pub n: usize,
    pub level: f64,
    pub rows: Vec<TableRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageRecord {
    pub params: ParamsOut,
    pub alpha: f64,
    pub beta: f64,
    pub n: usize,
    pub level: f64,
    pub a_mode: AMode,
    pub estimator: AEstimator,
    pub report: CoverageReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub n: usize,
    pub params: ParamsOut,
    pub log_likelihood: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub params: ParamsOut,
    pub seed: u64,
    pub values: Vec<f64>,
}

impl OutputRecord {
    pub fn write(&self, format: Format, out: &mut dyn Write) -> io::Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, self)?;
                writeln!(out)
            }
            Format::Table => self.write_table(out),
        }
    }

    fn write_table(&self, out: &mut dyn Write) -> io::Result<()> {
        match self {
            OutputRecord::Interval(r) => write_interval(r, out),
            OutputRecord::Table(t) => write_rows(t, out),
            OutputRecord::Coverage(c) => write_coverage(c, out),
            OutputRecord::Fit(f) => {
                writeln!(out, "observations: {}", f.n)?;
                writeln!(out, "a: {:.6}", f.params.a)?;
                writeln!(out, "v: {:.6}", f.params.v)?;
                writeln!(out, "lambda: {:.6}", f.params.lambda)?;
                writeln!(out, "log-likelihood: {:.6}", f.log_likelihood)?;
                writeln!(out, "iterations: {}", f.iterations)
            }
            OutputRecord::Sample(s) => s.values.iter().try_for_each(|x| writeln!(out, "{x}")),
        }
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "inf".to_string(), |v| format!("{v:.6}"))
}

fn write_interval(r: &IntervalRecord, out: &mut dyn Write) -> io::Result<()> {
    let source = match r.a_source {
        ShapeSource::Given => "given",
        ShapeSource::Mle => "mle",
    };
    writeln!(out, "quantile orders: {} {}", r.alpha, r.beta)?;
    writeln!(out, "sample size: {}", r.n)?;
    writeln!(out, "estimated ratio: {:.6}", r.r_star)?;
    writeln!(out, "shape a ({source}): {:.6}", r.a)?;
    if let Some(fit) = &r.fit {
        writeln!(out, "fitted v: {:.6}", fit.v)?;
        writeln!(out, "fitted lambda: {:.6}", fit.lambda)?;
    }
    writeln!(out, "confidence level: {}", r.level)?;
    if let Some(s) = &r.shortest {
        writeln!(out, "risk of overestimation: {:.5}", s.over_risk)?;
        writeln!(out, "risk of underestimation: {:.5}", s.under_risk)?;
        writeln!(out, "length of the shortest confidence interval: {}", opt(s.length))?;
    }
    if let Some(s) = &r.standard {
        writeln!(out, "length of the standard confidence interval: {}", opt(s.length))?;
    }
    if let Some(p) = r.reduction_pct {
        writeln!(out, "length reduction: {p:.3} %")?;
    }
    if let Some(s) = &r.standard {
        writeln!(out, "standard c.i.: {:.6} {}", s.lower, opt(s.upper))?;
    }
    if let Some(s) = &r.shortest {
        writeln!(out, "shortest c.i.: {:.6} {}", s.lower, opt(s.upper))?;
    }
    Ok(())
}

fn write_rows(t: &TableRecord, out: &mut dyn Write) -> io::Result<()> {
    writeln!(out, "quantile orders {} {}, n = {}, level = {}", t.alpha, t.beta, t.n, t.level)?;
    writeln!(
        out,
        "{:>5} {:>6} {:>10} {:>10} {:>10} {:>10} {:>11}",
        "a", "r*", "over", "under", "shortest", "standard", "reduction%"
    )?;
    for row in &t.rows {
        writeln!(
            out,
            "{:>5.1} {:>6.1} {:>10.5} {:>10.5} {:>10.6} {:>10.6} {:>11.3}",
            row.a,
            row.r_star,
            row.over_risk,
            row.under_risk,
            row.short_length,
            row.standard_length,
            row.reduction_pct
        )?;
    }
    Ok(())
}

fn write_coverage(c: &CoverageRecord, out: &mut dyn Write) -> io::Result<()> {
    let r = &c.report;
    let method = match r.method {
        crate::mc::Method::Standard => "standard",
        crate::mc::Method::Shortest => "shortest",
    };
    writeln!(out, "method: {method}")?;
    writeln!(out, "parameters: a = {} v = {} lambda = {}", c.params.a, c.params.v, c.params.lambda)?;
    writeln!(out, "true ratio: {:.6}", r.true_ratio)?;
    writeln!(out, "replicates: {}", r.replicates)?;
    writeln!(out, "seed: {}", r.seed)?;
    writeln!(out, "failures: {}", r.failures)?;
    writeln!(out, "coverage: {:.6}", r.coverage)?;
    writeln!(out, "below lower end: {:.6}", r.below_lower)?;
    writeln!(out, "above upper end: {:.6}", r.above_upper)?;
    writeln!(out, "mean length: {:.6}", r.mean_length)?;
    writeln!(out, "mean risk of overestimation: {:.6}", r.mean_over_risk)?;
    if !r.valid {
        writeln!(out, "warning: too many failed replicates, report is not reliable")?;
    }
    Ok(())
}
