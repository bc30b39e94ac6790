//! Small numerically stable helpers shared by the distribution code.

/// `ln(e^t - 1)` for `t > 0`, without overflow for large `t` and without
/// cancellation for small `t`.
pub(crate) fn ln_expm1(t: f64) -> f64 {
    if t > 1.0 {
        t + (-(-t).exp()).ln_1p()
    } else {
        t.exp_m1().ln()
    }
}

/// `ln(1 + e^y)`.
pub(crate) fn softplus(y: f64) -> f64 {
    if y > 0.0 {
        y + (-y).exp().ln_1p()
    } else {
        y.exp().ln_1p()
    }
}

/// `1 - p^(1/a)` computed as `-expm1(ln p / a)`.
pub(crate) fn one_minus_root(p: f64, a: f64) -> f64 {
    -(p.ln() / a).exp_m1()
}
