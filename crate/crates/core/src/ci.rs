//! Confidence intervals for a Dagum quantile ratio.
//!
//! An interval end at risk level `γ` is the `ρ > 1` solving the pivot
//! equation
//!
//! ```text
//! √n (r* - ρ) = u_γ w(a) ρ ln ρ
//! ```
//!
//! where `u_γ` is the standard normal `γ`-quantile. With `z = √n / (u_γ w(a))`
//! the solution is `ρ = r* z / W(r* z e^z)`. For `u_γ > 0` the argument is
//! positive and W₀ gives the unique root in `(1, r*)`. For `u_γ < 0` the
//! equation has two roots above `r*` (or none, in which case the interval is
//! unbounded above); the interval end is the one nearest `r*`, which is the
//! root connected to `ρ = r*` as `u_γ → 0`.
//!
//! An interval at confidence level `δ` with overestimation risk `s` runs
//! from the end at `γ = δ + s` to the end at `γ = s`. `s = (1 - δ)/2` gives
//! the standard equal-tailed interval; minimizing the length over `s` gives
//! the shortest one.

use crate::error::{Error, Result};
use crate::estimator::RatioEstimate;
use crate::optimize::{find_root, minimize_scalar};
use crate::special_fn::{lambert_w, lambert_w0_exp, lambert_wm1_neg_exp, normal_quantile, Branch};

/// Largest scaled pivot residual accepted from the closed form.
pub const CLOSED_FORM_RESIDUAL: f64 = 1e-9;

/// Splits closer than this to either edge are not evaluated by the optimizer.
const SPLIT_EDGE: f64 = 1e-9;
const SPLIT_TOL: f64 = 1e-12;

const BRACKET_START: f64 = 10.0;
const BRACKET_CAP: f64 = (1u64 << 40) as f64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceInterval {
    pub lower: f64,
    /// `+∞` when the confidence set is unbounded above.
    pub upper: f64,
    pub level: f64,
    /// `1 - δ₁`: probability that the true ratio lies below `lower`.
    pub under_risk: f64,
    /// `δ₁ - δ`: probability that the true ratio lies above `upper`.
    pub over_risk: f64,
    pub length: f64,
}

impl ConfidenceInterval {
    pub fn contains(&self, r: f64) -> bool {
        self.lower <= r && r <= self.upper
    }
}

/// Overestimation risk `s = δ₁ - δ`, strictly inside `(0, 1 - δ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskSplit(f64);

impl RiskSplit {
    pub fn new(s: f64, level: f64) -> Result<Self> {
        check_level(level)?;
        if !(s > 0.0 && s < 1.0 - level) {
            return Err(Error::domain("risk split (must lie in (0, 1 - level))", s));
        }
        Ok(Self(s))
    }

    /// The equal-risk split `(1 - δ)/2`.
    pub fn equal(level: f64) -> Result<Self> {
        Self::new(0.5 * (1.0 - level), level)
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// The pivot equation at one risk level, scaled by `1/√n`:
/// `g(ρ) = (r* - ρ) - k ρ ln ρ` with `k = u_γ w(a) / √n`.
#[derive(Debug, Clone, Copy)]
struct Pivot {
    r_star: f64,
    k: f64,
}

impl Pivot {
    fn new(gamma: f64, est: &RatioEstimate) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::domain("risk level gamma", gamma));
        }
        if !(est.r_star > 1.0) {
            return Err(Error::domain("sample quantile ratio r* (must exceed 1)", est.r_star));
        }
        let u = normal_quantile(gamma)?;
        if u == 0.0 {
            return Err(Error::domain("risk level gamma (u_gamma = 0 is a pole)", gamma));
        }
        let k = u * est.w()? / (est.n as f64).sqrt();
        Ok(Self { r_star: est.r_star, k })
    }

    fn g(&self, rho: f64) -> f64 {
        (self.r_star - rho) - self.k * rho * rho.ln()
    }

    fn scaled_residual(&self, rho: f64) -> f64 {
        self.g(rho).abs() / self.r_star
    }
}

/// Pivot residual `|√n (r* - ρ) - u_γ w(a) ρ ln ρ| / (√n r*)`.
pub fn pivot_residual(gamma: f64, est: &RatioEstimate, rho: f64) -> Result<f64> {
    Ok(Pivot::new(gamma, est)?.scaled_residual(rho))
}

/// Interval end at risk level `γ` through the Lambert W function.
pub fn endpoint_closed_form(gamma: f64, est: &RatioEstimate) -> Result<f64> {
    let pivot = Pivot::new(gamma, est)?;
    let r = pivot.r_star;
    let z = 1.0 / pivot.k;
    let accept =
        |rho: f64| rho.is_finite() && rho > 1.0 && pivot.scaled_residual(rho) <= CLOSED_FORM_RESIDUAL;

    if z > 0.0 {
        // W₀(r* z e^z), argument kept in log form.
        let t = lambert_w0_exp(r.ln() + z.ln() + z)?;
        let rho = r * z / t;
        return if accept(rho) && rho <= r { Ok(rho) } else { Err(Error::ClosedForm { gamma }) };
    }

    // Argument r* z e^z = -e^l with l = ln r* + ln|z| + z.
    let m = -z;
    let l = r.ln() + m.ln() - m;
    if l > -1.0 + 1e-15 {
        return Err(Error::NoEndpoint { gamma });
    }
    let lower_branch = lambert_wm1_neg_exp(l).ok();
    let principal = if l >= -700.0 { lambert_w(-l.exp(), Branch::Principal).ok() } else { None };
    [lower_branch, principal]
        .into_iter()
        .flatten()
        .map(|t| r * m / -t)
        .filter(|&rho| accept(rho) && rho >= r)
        .min_by(f64::total_cmp)
        .ok_or(Error::ClosedForm { gamma })
}

/// Interval end at risk level `γ` by bracketed root finding on the pivot
/// equation.
///
/// The bracket starts at `[1 + 1e-12, 10]` and its upper end is doubled
/// (up to `2⁴⁰`) until the residual changes sign. For `u_γ < 0` the residual
/// is convex in `ρ`; once the scan passes its minimum without a sign change
/// the minimum itself decides between a root and no root.
pub fn endpoint_root_find(gamma: f64, est: &RatioEstimate) -> Result<f64> {
    let pivot = Pivot::new(gamma, est)?;
    let lo = 1.0 + 1e-12;
    if !(pivot.g(lo) > 0.0) {
        return Err(Error::Bracketing { lo, hi: lo });
    }
    let valley = if pivot.k < 0.0 { (-1.0 / pivot.k - 1.0).exp() } else { f64::INFINITY };

    let mut last_positive = lo;
    let mut hi = BRACKET_START;
    let bracket = loop {
        if pivot.g(hi) < 0.0 {
            break (last_positive, hi);
        }
        if hi > valley {
            if pivot.g(valley) < 0.0 {
                break (last_positive, valley);
            }
            return Err(Error::NoEndpoint { gamma });
        }
        last_positive = hi;
        hi *= 2.0;
        if hi > BRACKET_CAP {
            return Err(Error::Bracketing { lo, hi: BRACKET_CAP });
        }
    };
    find_root(|rho| pivot.g(rho), bracket.0, bracket.1, 0.0, 300)
}

/// Interval end at risk level `γ`: closed form, falling back to root finding
/// when no branch of W yields an acceptable root.
pub fn endpoint(gamma: f64, est: &RatioEstimate) -> Result<f64> {
    match endpoint_closed_form(gamma, est) {
        Err(Error::ClosedForm { .. }) => endpoint_root_find(gamma, est),
        other => other,
    }
}

/// The interval with overestimation risk `split` at confidence `level`.
pub fn interval_for_split(est: &RatioEstimate, level: f64, split: RiskSplit) -> Result<ConfidenceInterval> {
    check_level(level)?;
    let s = split.value();
    if !(s < 1.0 - level) {
        return Err(Error::domain("risk split (must lie in (0, 1 - level))", s));
    }
    let end = |gamma: f64| {
        if gamma == 0.5 && est.r_star > 1.0 {
            Ok(est.r_star)
        } else {
            endpoint(gamma, est)
        }
    };
    let lower = end(level + s)?;
    let upper = match end(s) {
        Err(Error::NoEndpoint { .. }) => f64::INFINITY,
        other => other?,
    };
    Ok(ConfidenceInterval {
        lower,
        upper,
        level,
        under_risk: (1.0 - level) - s,
        over_risk: s,
        length: upper - lower,
    })
}

/// Equal-tailed interval, `δ₁ = (1 + δ)/2`.
pub fn standard_interval(est: &RatioEstimate, level: f64) -> Result<ConfidenceInterval> {
    interval_for_split(est, level, RiskSplit::equal(level)?)
}

/// Interval length as a function of the overestimation risk.
pub fn interval_length(split: RiskSplit, est: &RatioEstimate, level: f64) -> Result<f64> {
    Ok(interval_for_split(est, level, split)?.length)
}

/// The shortest interval over all risk splits at confidence `level`.
pub fn shortest_interval(est: &RatioEstimate, level: f64) -> Result<ConfidenceInterval> {
    let standard = standard_interval(est, level)?;
    let (lo, hi) = (SPLIT_EDGE, 1.0 - level - SPLIT_EDGE);
    if !(lo < hi) {
        return Err(Error::domain("confidence level (too close to 1)", level));
    }
    let objective = |s: f64| {
        RiskSplit::new(s, level).and_then(|split| interval_length(split, est, level)).unwrap_or(f64::INFINITY)
    };
    let m = minimize_scalar(objective, lo, hi, SPLIT_TOL, 500)?;
    if !m.fx.is_finite() {
        return Err(Error::Optimizer("no finite interval length found"));
    }
    let margin = 1e3 * SPLIT_EDGE;
    if m.x < lo + margin || m.x > hi - margin {
        return Err(Error::Optimizer("minimum at the edge of the risk range"));
    }
    if m.fx > standard.length {
        return Err(Error::Optimizer("minimum is longer than the standard interval"));
    }
    interval_for_split(est, level, RiskSplit::new(m.x, level)?)
}

/// Percent length reduction of `short` relative to `standard`.
pub fn reduction_pct(short: &ConfidenceInterval, standard: &ConfidenceInterval) -> f64 {
    100.0 * (1.0 - short.length / standard.length)
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::domain("confidence level", level))
    }
}
