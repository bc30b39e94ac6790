//! Sample-side quantities: the order-statistic ratio estimator, its
//! asymptotic variance factor, and Dagum parameter fits.

use alloc::vec::Vec;

use crate::dagum::{log_core_gap, v_from_ratio, DagumParams, RatioSpec};
use crate::error::{Error, Result};
use crate::math::one_minus_root;
use crate::optimize::{minimize_scalar, nelder_mead};

/// Observed quantile ratio together with what inference needs about it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioEstimate {
    pub r_star: f64,
    pub n: usize,
    pub spec: RatioSpec,
    pub a_hat: f64,
}

impl RatioEstimate {
    pub fn new(r_star: f64, n: usize, spec: RatioSpec, a_hat: f64) -> Result<Self> {
        if !(r_star > 0.0) || r_star.is_infinite() {
            return Err(Error::domain("sample quantile ratio", r_star));
        }
        if n == 0 {
            return Err(Error::InvalidInput("sample size must be at least 1"));
        }
        if !(a_hat > 0.0) || a_hat.is_infinite() {
            return Err(Error::domain("shape estimate a", a_hat));
        }
        Ok(Self { r_star, n, spec, a_hat })
    }

    /// Estimate from raw data with a given shape.
    pub fn from_data(data: &[f64], spec: RatioSpec, a_hat: f64) -> Result<Self> {
        let r = sample_quantile_ratio(data, &spec)?;
        Self::new(r, data.len(), spec, a_hat)
    }

    /// `w(a)`, the square root of [`asymptotic_w2`].
    pub fn w(&self) -> Result<f64> {
        Ok(asymptotic_w2(self.a_hat, &self.spec)?.sqrt())
    }
}

/// Zero-based indices `⌊αn⌋` and `⌊βn⌋` of the order statistics
/// `X_{⌊αn⌋+1:n}` and `X_{⌊βn⌋+1:n}`.
pub fn order_statistic_indices(n: usize, spec: &RatioSpec) -> Result<(usize, usize)> {
    let lo = (spec.alpha() * n as f64).floor() as usize;
    let hi = (spec.beta() * n as f64).floor() as usize;
    if hi >= n {
        return Err(Error::InvalidInput("sample too small: beta order statistic exceeds n"));
    }
    if lo == hi {
        return Err(Error::InvalidInput("sample too small: alpha and beta order statistics coincide"));
    }
    Ok((lo, hi))
}

/// `X_{⌊βn⌋+1:n} / X_{⌊αn⌋+1:n}`.
pub fn sample_quantile_ratio(data: &[f64], spec: &RatioSpec) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::InvalidInput("data must be nonempty"));
    }
    if let Some(&bad) = data.iter().find(|&&x| !(x > 0.0) || x.is_infinite()) {
        return Err(Error::domain("income (must be positive and finite)", bad));
    }
    let (lo, hi) = order_statistic_indices(data.len(), spec)?;
    let mut buf: Vec<f64> = data.to_vec();
    let (left, &mut upper, _) = buf.select_nth_unstable_by(hi, f64::total_cmp);
    let (_, &mut lower, _) = left.select_nth_unstable_by(lo, f64::total_cmp);
    Ok(upper / lower)
}

/// Asymptotic variance factor `w²(a)` of the pivot
/// `√n (r* - r) / (r ln r w(a))`.
///
/// This is the form with `(a ln((α^(-1/a) - 1)/(β^(-1/a) - 1)))²` in the
/// denominator; it depends on the shape `a` and the quantile orders only.
pub fn asymptotic_w2(a: f64, spec: &RatioSpec) -> Result<f64> {
    if !(a > 0.0) || a.is_infinite() {
        return Err(Error::domain("shape a", a));
    }
    let gap = log_core_gap(a, spec);
    let w2 = variance_bracket(a, spec) / (a * gap).powi(2);
    if w2 > 0.0 && w2.is_finite() {
        Ok(w2)
    } else {
        Err(Error::domain("shape a (variance factor not finite)", a))
    }
}

/// `w²` in terms of both shapes, `bracket / (a v)²`. This is the variance of
/// `(r* - r)/r` rather than of the pivot; it equals `(ln r)² · asymptotic_w2`.
pub fn asymptotic_w2_av(params: &DagumParams, spec: &RatioSpec) -> f64 {
    variance_bracket(params.a(), spec) / (params.a() * params.v()).powi(2)
}

fn variance_bracket(a: f64, spec: &RatioSpec) -> f64 {
    let (alpha, beta) = (spec.alpha(), spec.beta());
    let odds_b = (1.0 - beta) / beta;
    let odds_a = (1.0 - alpha) / alpha;
    let da = one_minus_root(alpha, a);
    let db = one_minus_root(beta, a);
    odds_b / (db * db) + odds_a / (da * da) - 2.0 * odds_b / (da * db)
}

/// Dagum log-likelihood of `data`.
pub fn log_likelihood(params: &DagumParams, data: &[f64]) -> Result<f64> {
    data.iter().try_fold(0.0, |acc, &x| Ok(acc + params.ln_pdf(x)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleFit {
    pub params: DagumParams,
    pub log_likelihood: f64,
    pub iterations: usize,
}

pub const MLE_MAX_ITER: usize = 500;
const MLE_MIN_N: usize = 50;

/// Maximum-likelihood fit of all three Dagum parameters.
///
/// Nelder–Mead over `(ln a, ln v, ln λ)`. The start is `λ₀` = sample median,
/// `a₀ = 1` and `v₀` matching the empirical 0.2/0.8 quantile ratio.
pub fn fit_dagum_mle(data: &[f64]) -> Result<MleFit> {
    if data.len() < MLE_MIN_N {
        return Err(Error::InvalidInput("maximum likelihood fit needs at least 50 observations"));
    }
    if let Some(&bad) = data.iter().find(|&&x| !(x > 0.0) || x.is_infinite()) {
        return Err(Error::domain("income (must be positive and finite)", bad));
    }
    let mut sorted = data.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = empirical_quantile(&sorted, 0.5);
    let r_emp = empirical_quantile(&sorted, 0.8) / empirical_quantile(&sorted, 0.2);
    let v0 = match v_from_ratio(1.0, &RatioSpec::QUINTILE, r_emp) {
        Ok(v) => v,
        Err(_) => {
            return Err(Error::FitFailed {
                reason: "degenerate sample (no spread between quantiles)",
                iterations: 0,
                best: None,
            })
        }
    };
    let start = DagumParams::new(1.0, v0, median)?;
    let start_ll = log_likelihood(&start, data)?;

    // Centering by the start point keeps the simplex well scaled.
    let x0 = [0.0, v0.ln(), median.ln()];
    let neg_ll = |x: &[f64; 3]| -> f64 {
        match DagumParams::new(x[0].exp(), x[1].exp(), x[2].exp()) {
            Ok(p) => log_likelihood(&p, data).map(|ll| -ll).unwrap_or(f64::INFINITY),
            Err(_) => f64::INFINITY,
        }
    };
    let mut res = nelder_mead(neg_ll, x0, 0.25, 1e-12, MLE_MAX_ITER);
    let mut iterations = res.iterations;
    if !res.converged {
        let best = DagumParams::new(res.x[0].exp(), res.x[1].exp(), res.x[2].exp()).ok();
        return Err(Error::FitFailed { reason: "iteration cap reached", iterations, best });
    }
    // One restart from the optimum guards against a collapsed simplex.
    let again = nelder_mead(neg_ll, res.x, 0.05, 1e-12, MLE_MAX_ITER - iterations);
    if again.fx <= res.fx {
        iterations += again.iterations;
        res = again;
    }
    let params = DagumParams::new(res.x[0].exp(), res.x[1].exp(), res.x[2].exp())?;
    let ll = -res.fx;
    if !ll.is_finite() || ll < start_ll {
        return Err(Error::FitFailed {
            reason: "likelihood did not improve on the starting point",
            iterations,
            best: Some(params),
        });
    }
    Ok(MleFit { params, log_likelihood: ll, iterations })
}

/// Quantile-matching fit: the median fixes `λ` given `(a, v)`, the 0.1/0.9
/// ratio fixes `v` given `a`, and `a` matches the 0.1/0.5 ratio.
///
/// Much cheaper than [`fit_dagum_mle`]; intended for large simulation runs.
pub fn fit_dagum_quantiles(data: &[f64]) -> Result<DagumParams> {
    if data.len() < 10 {
        return Err(Error::InvalidInput("quantile fit needs at least 10 observations"));
    }
    if let Some(&bad) = data.iter().find(|&&x| !(x > 0.0) || x.is_infinite()) {
        return Err(Error::domain("income (must be positive and finite)", bad));
    }
    let mut sorted = data.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (q10, q50, q90) = (
        empirical_quantile(&sorted, 0.1),
        empirical_quantile(&sorted, 0.5),
        empirical_quantile(&sorted, 0.9),
    );
    let outer = q90 / q10;
    let inner = q50 / q10;
    if !(outer > 1.0 && inner > 1.0 && inner < outer) {
        return Err(Error::FitFailed {
            reason: "degenerate sample (no spread between quantiles)",
            iterations: 0,
            best: None,
        });
    }
    let inner_spec = RatioSpec::new(0.1, 0.5)?;
    let target = inner.ln() / outer.ln();
    // ln Q(0.5)/Q(0.1) divided by ln Q(0.9)/Q(0.1) depends on a only.
    let mismatch = |ln_a: f64| {
        let a = ln_a.exp();
        let share = log_core_gap(a, &inner_spec) / log_core_gap(a, &RatioSpec::DECILE);
        (share - target).powi(2)
    };
    let m = minimize_scalar(mismatch, (1e-3f64).ln(), (1e3f64).ln(), 1e-10, 200)?;
    let a = m.x.exp();
    let v = v_from_ratio(a, &RatioSpec::DECILE, outer)?;
    let unit = DagumParams::new(a, v, 1.0)?;
    let lambda = q50 / unit.quantile(0.5)?;
    DagumParams::new(a, v, lambda)
}

/// Order statistic `X_{⌊qn⌋+1:n}` of sorted data.
fn empirical_quantile(sorted: &[f64], q: f64) -> f64 {
    let i = ((q * sorted.len() as f64).floor() as usize).min(sorted.len() - 1);
    sorted[i]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_of_one_to_ten() {
        let data: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(sample_quantile_ratio(&data, &RatioSpec::QUINTILE).unwrap(), 3.0);
        let mut shuffled = data.clone();
        shuffled.reverse();
        shuffled.swap(2, 7);
        assert_eq!(sample_quantile_ratio(&shuffled, &RatioSpec::QUINTILE).unwrap(), 3.0);
    }

    #[test]
    fn constant_sample_has_unit_ratio() {
        assert_eq!(sample_quantile_ratio(&[5.0; 5], &RatioSpec::QUINTILE).unwrap(), 1.0);
    }

    #[test]
    fn ratio_input_errors() {
        let spec = RatioSpec::QUINTILE;
        assert!(sample_quantile_ratio(&[], &spec).is_err());
        assert!(sample_quantile_ratio(&[1.0, 2.0, 0.0, 4.0, 5.0], &spec).is_err());
        assert!(sample_quantile_ratio(&[1.0, 2.0, -3.0, 4.0, 5.0], &spec).is_err());
        // n = 1: ⌊0.8⌋ + 1 = 1 ≤ n but both indices coincide.
        assert!(sample_quantile_ratio(&[1.0], &spec).is_err());
        // beta close to 1 pushes the index past n.
        let spec = RatioSpec::new(0.1, 0.99).unwrap();
        assert!(sample_quantile_ratio(&[1.0, 2.0, 3.0], &spec).is_ok());
    }

    #[test]
    fn w2_hand_value() {
        let w2 = asymptotic_w2(1.0, &RatioSpec::QUINTILE).unwrap();
        let hand = 9.375 / 16f64.ln().powi(2);
        assert!((w2 - hand).abs() < 1e-14);
        assert!((w2 - 1.21956).abs() < 1e-5);
    }

    #[test]
    fn w2_matches_direct_formula_on_table_grid() {
        for spec in [RatioSpec::QUINTILE, RatioSpec::DECILE] {
            for a in [0.1, 0.5, 1.0] {
                let (al, be) = (spec.alpha(), spec.beta());
                let direct = (a * ((al.powf(-1.0 / a) - 1.0) / (be.powf(-1.0 / a) - 1.0)).ln()).powi(-2)
                    * ((1.0 - be) / be / (1.0 - be.powf(1.0 / a)).powi(2)
                        + (1.0 - al) / al / (1.0 - al.powf(1.0 / a)).powi(2)
                        - 2.0 * (1.0 - be) / be / ((1.0 - be.powf(1.0 / a)) * (1.0 - al.powf(1.0 / a))));
                let w2 = asymptotic_w2(a, &spec).unwrap();
                assert!((w2 - direct).abs() < 1e-12 * direct);
            }
        }
    }

    #[test]
    fn w2_positive_over_wide_grid() {
        for spec in [RatioSpec::QUINTILE, RatioSpec::DECILE] {
            let mut a = 0.05;
            while a <= 5.0 + 1e-9 {
                let w2 = asymptotic_w2(a, &spec).unwrap();
                assert!(w2 > 0.0 && w2.is_finite(), "a={a}");
                a += 0.05;
            }
        }
        assert!(asymptotic_w2(1e-3, &RatioSpec::QUINTILE).unwrap().is_finite());
        assert!(asymptotic_w2(0.0, &RatioSpec::QUINTILE).is_err());
    }

    #[test]
    fn two_w2_forms_differ_by_log_ratio_squared() {
        let spec = RatioSpec::DECILE;
        for (a, r) in [(0.1, 2.0), (0.5, 4.0), (1.0, 6.0), (2.5, 3.3)] {
            let v = v_from_ratio(a, &spec, r).unwrap();
            let p = DagumParams::new(a, v, 1.0).unwrap();
            let first = asymptotic_w2_av(&p, &spec);
            let second = asymptotic_w2(a, &spec).unwrap();
            assert!((first - r.ln().powi(2) * second).abs() < 1e-12 * first);
        }
    }

    #[test]
    fn mle_rejects_degenerate_and_small_samples() {
        let e = fit_dagum_mle(&[3.0; 100]).unwrap_err();
        assert!(matches!(e, Error::FitFailed { .. }));
        assert!(fit_dagum_mle(&[1.0; 10]).unwrap_err().is_validation());
        assert!(fit_dagum_quantiles(&[3.0; 100]).is_err());
    }
}
