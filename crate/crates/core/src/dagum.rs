//! The Dagum income distribution with CDF `(1 + (x/λ)^-v)^-a`.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::math::{ln_expm1, softplus};

/// Shape parameters `a`, `v` and scale `lambda` of a Dagum law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DagumParams {
    a: f64,
    v: f64,
    lambda: f64,
}

impl DagumParams {
    pub fn new(a: f64, v: f64, lambda: f64) -> Result<Self> {
        check_positive("shape a", a)?;
        check_positive("shape v", v)?;
        check_positive("scale lambda", lambda)?;
        Ok(Self { a, v, lambda })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Distribution function. Defined as 0 at `x = 0`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::domain("income", x));
        }
        if x == 0.0 {
            return Ok(0.0);
        }
        // (x/λ)^-v = exp(-v ln(x/λ)); the whole expression in log space.
        let y = -self.v * (x / self.lambda).ln();
        Ok((-self.a * softplus(y)).exp())
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        Ok(self.ln_pdf(x)?.exp())
    }

    /// Log density, used by the likelihood.
    pub fn ln_pdf(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) || x.is_infinite() {
            return Err(Error::domain("income", x));
        }
        let ln_y = (x / self.lambda).ln();
        Ok((self.a * self.v / self.lambda).ln() + (self.a * self.v - 1.0) * ln_y
            - (self.a + 1.0) * softplus(self.v * ln_y))
    }

    /// Quantile function `λ (q^(-1/a) - 1)^(-1/v)`.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::domain("probability", q));
        }
        Ok(self.lambda * (-ln_core(q, self.a) / self.v).exp())
    }

    /// `count` independent draws by inverse-transform sampling.
    pub fn sample(&self, count: usize, seed: u64) -> Result<Vec<f64>> {
        self.sample_stream(count, seed, 0)
    }

    /// Like [`sample`](Self::sample), drawing from stream `stream` of the
    /// generator keyed by `seed`. Distinct streams are independent, so
    /// replicate `i` of a study can use stream `i` regardless of scheduling.
    pub fn sample_stream(&self, count: usize, seed: u64, stream: u64) -> Result<Vec<f64>> {
        if count == 0 {
            return Err(Error::InvalidInput("sample count must be at least 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let u = open_unit(rng.next_u64());
            out.push(self.lambda * (-ln_core(u, self.a) / self.v).exp());
        }
        Ok(out)
    }
}

/// Quantile orders `0 < alpha < beta < 1` of the ratio `Q(beta) / Q(alpha)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioSpec {
    alpha: f64,
    beta: f64,
}

impl RatioSpec {
    /// Quintile share ratio S80/S20.
    pub const QUINTILE: RatioSpec = RatioSpec { alpha: 0.2, beta: 0.8 };
    /// Decile ratio P90/P10.
    pub const DECILE: RatioSpec = RatioSpec { alpha: 0.1, beta: 0.9 };

    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::domain("quantile order alpha", alpha));
        }
        if !(beta > alpha && beta < 1.0) {
            return Err(Error::domain("quantile order beta (must satisfy alpha < beta < 1)", beta));
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// `Q(beta) / Q(alpha)`; does not depend on the scale.
pub fn ratio_of_quantiles(params: &DagumParams, spec: &RatioSpec) -> f64 {
    (log_core_gap(params.a, spec) / params.v).exp()
}

/// The shape `v` for which the Dagum law with shape `a` has quantile ratio `r`.
pub fn v_from_ratio(a: f64, spec: &RatioSpec, r: f64) -> Result<f64> {
    check_positive("shape a", a)?;
    if !(r > 1.0) || r.is_infinite() {
        return Err(Error::domain("quantile ratio (must exceed 1)", r));
    }
    Ok(log_core_gap(a, spec) / r.ln())
}

/// `ln((alpha^(-1/a) - 1) / (beta^(-1/a) - 1))`, positive for `alpha < beta`.
pub(crate) fn log_core_gap(a: f64, spec: &RatioSpec) -> f64 {
    ln_core(spec.alpha, a) - ln_core(spec.beta, a)
}

/// `ln(q^(-1/a) - 1)`.
fn ln_core(q: f64, a: f64) -> f64 {
    ln_expm1(-q.ln() / a)
}

/// Maps 52 random bits to the open interval (0, 1).
fn open_unit(bits: u64) -> f64 {
    ((bits >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

fn check_positive(what: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(what, x))
    }
}
