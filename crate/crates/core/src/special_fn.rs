//! Real Lambert W (branches W₀ and W₋₁) and the standard normal quantile.

use core::f64::consts::{E, FRAC_1_SQRT_2, SQRT_2};

use crate::error::{Error, Result};

/// `1/e` split into a leading double and the rounding remainder, so that
/// `x + 1/e` keeps its low-order bits near the branch point.
const INV_E_HI: f64 = 0.367_879_441_171_442_33;
const INV_E_LO: f64 = -1.242_875_367_278_045_4e-17;

/// Arguments closer than this below `-1/e` are treated as the branch point.
const BRANCH_POINT_SLACK: f64 = 1e-15;

const HALLEY_MAX_ITER: usize = 100;

/// Above this, `exp` of the log-argument overflows.
const EXP_ARG_LIMIT: f64 = 700.0;

/// Real branch of the Lambert W function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// W₀, defined on `[-1/e, ∞)` with values `≥ -1`.
    Principal,
    /// W₋₁, defined on `[-1/e, 0)` with values `≤ -1`.
    Lower,
}

/// Solves `t·eᵗ = x` for `t` on the requested branch.
pub fn lambert_w(x: f64, branch: Branch) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::domain("Lambert W argument", x));
    }
    // Distance to the branch point, carried in extra precision.
    let d = (x + INV_E_HI) + INV_E_LO;
    if d < -BRANCH_POINT_SLACK {
        return Err(Error::domain("Lambert W argument", x));
    }
    if d <= 0.0 {
        return Ok(-1.0);
    }
    match branch {
        Branch::Principal => {
            if x == 0.0 {
                return Ok(0.0);
            }
            if x == f64::INFINITY {
                return Ok(f64::INFINITY);
            }
            Ok(halley(x, principal_guess(x, d)))
        }
        Branch::Lower => {
            if x >= 0.0 {
                return Err(Error::domain("lower-branch Lambert W argument", x));
            }
            Ok(halley(x, lower_guess(x, d)).min(-1.0))
        }
    }
}

/// `W₀(e^l)`; stays finite when `e^l` itself would overflow.
pub fn lambert_w0_exp(l: f64) -> Result<f64> {
    if l.is_nan() {
        return Err(Error::domain("Lambert W log-argument", l));
    }
    if l <= EXP_ARG_LIMIT {
        return lambert_w(l.exp(), Branch::Principal);
    }
    if l == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    // Newton on t + ln t = l; t > 600 here so the map is nearly linear.
    let mut t = l - l.ln();
    for _ in 0..HALLEY_MAX_ITER {
        let step = (t + t.ln() - l) / (1.0 + 1.0 / t);
        t -= step;
        if step.abs() <= 1e-16 * t {
            break;
        }
    }
    Ok(t)
}

/// `W₋₁(-e^l)` for `l ≤ -1`; stays accurate when `e^l` underflows.
pub fn lambert_wm1_neg_exp(l: f64) -> Result<f64> {
    if l.is_nan() || l > -1.0 + BRANCH_POINT_SLACK {
        return Err(Error::domain("lower-branch Lambert W log-argument", l));
    }
    if l >= -1.0 {
        return Ok(-1.0);
    }
    if l >= -EXP_ARG_LIMIT {
        return lambert_w(-l.exp(), Branch::Lower);
    }
    if l == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    // With t = -s: s - ln s = -l, solved by Newton from the asymptotic guess.
    let target = -l;
    let mut s = target + target.ln();
    for _ in 0..HALLEY_MAX_ITER {
        let step = (s - s.ln() - target) / (1.0 - 1.0 / s);
        s -= step;
        if step.abs() <= 1e-16 * s {
            break;
        }
    }
    Ok(-s)
}

fn principal_guess(x: f64, d: f64) -> f64 {
    if x < -0.25 {
        let p = (2.0 * E * d).sqrt();
        -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * 11.0 / 72.0))
    } else if x < 3.0 {
        // Winitzki's approximation.
        let l = x.ln_1p();
        l * (1.0 - l.ln_1p() / (2.0 + l))
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    }
}

fn lower_guess(x: f64, d: f64) -> f64 {
    if x < -0.25 {
        let p = (2.0 * E * d).sqrt();
        -1.0 - p * (1.0 + p * (1.0 / 3.0 + p * 11.0 / 72.0))
    } else {
        let l1 = (-x).ln();
        let l2 = (-l1).ln();
        l1 - l2 + l2 / l1
    }
}

fn halley(x: f64, mut t: f64) -> f64 {
    let mut last_step = f64::INFINITY;
    for _ in 0..HALLEY_MAX_ITER {
        let et = t.exp();
        let f = t * et - x;
        if f == 0.0 {
            break;
        }
        let tp1 = t + 1.0;
        if tp1 == 0.0 {
            break;
        }
        let step = f / (et * tp1 - (t + 2.0) * f / (2.0 * tp1));
        if !step.is_finite() {
            break;
        }
        t -= step;
        let size = step.abs();
        // Stop at the tolerance, or once rounding noise stops the contraction.
        if size <= 1e-16 * (1.0 + t.abs()) || (size >= last_step && size < 1e-12 * (1.0 + t.abs())) {
            break;
        }
        last_step = size;
    }
    t
}

/// Standard normal CDF Φ.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal density φ.
pub fn normal_pdf(x: f64) -> f64 {
    const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Quantile function of N(0, 1).
///
/// Wichura's AS 241 rational approximation followed by one Newton step
/// against `erfc`. The lower tail is computed directly and the upper tail by
/// reflection, so `normal_quantile(1 - p) == -normal_quantile(p)` whenever
/// `1 - p` is exact.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain("probability", p));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    let (tail, sign) = if p < 0.5 { (p, -1.0) } else { (1.0 - p, 1.0) };
    let mut x = -ppnd16(tail);
    // x is the upper-tail deviate: Q(x) = tail, with Q = 1 - Φ.
    let q = 0.5 * libm::erfc(x / SQRT_2);
    let dens = normal_pdf(x);
    if dens > 0.0 {
        x += (q - tail) / dens;
    }
    Ok(sign * x)
}

/// AS 241 (PPND16) for `0 < p ≤ 0.5`, returning the lower-tail deviate.
fn ppnd16(p: f64) -> f64 {
    const SPLIT1: f64 = 0.425;
    const SPLIT2: f64 = 5.0;
    const CONST1: f64 = 0.180_625;
    const CONST2: f64 = 1.6;

    const A: [f64; 8] = [
        3.387_132_872_796_366_6,
        1.331_416_678_917_843_8e2,
        1.971_590_950_306_551_3e3,
        1.373_169_376_550_946e4,
        4.592_195_393_154_987e4,
        6.726_577_092_700_87e4,
        3.343_057_558_358_813e4,
        2.509_080_928_730_122_7e3,
    ];
    const B: [f64; 8] = [
        1.0,
        4.231_333_070_160_091e1,
        6.871_870_074_920_579e2,
        5.394_196_021_424_751e3,
        2.121_379_430_158_659_7e4,
        3.930_789_580_009_271e4,
        2.872_908_573_572_194_3e4,
        5.226_495_278_852_546e3,
    ];
    const C: [f64; 8] = [
        1.423_437_110_749_683_5,
        4.630_337_846_156_545,
        5.769_497_221_460_691,
        3.647_848_324_763_204_5,
        1.270_458_252_452_368_4,
        2.417_807_251_774_506e-1,
        2.272_384_498_926_918_4e-2,
        7.745_450_142_783_414e-4,
    ];
    const D: [f64; 8] = [
        1.0,
        2.053_191_626_637_759,
        1.676_384_830_183_803_8,
        6.897_673_349_851e-1,
        1.481_039_764_274_800_8e-1,
        1.519_866_656_361_645_7e-2,
        5.475_938_084_995_345e-4,
        1.050_750_071_644_416_8e-9,
    ];
    const EE: [f64; 8] = [
        6.657_904_643_501_103,
        5.463_784_911_164_114,
        1.784_826_539_917_291_3,
        2.965_605_718_285_048_7e-1,
        2.653_218_952_657_612_4e-2,
        1.242_660_947_388_078_4e-3,
        2.711_555_568_743_487_6e-5,
        2.010_334_399_292_288_1e-7,
    ];
    const F: [f64; 8] = [
        1.0,
        5.998_322_065_558_88e-1,
        1.369_298_809_227_358e-1,
        1.487_536_129_085_061_5e-2,
        7.868_691_311_456_133e-4,
        1.846_318_317_510_054_8e-5,
        1.421_511_758_316_446e-7,
        2.044_263_103_389_939_7e-15,
    ];

    fn poly(c: &[f64; 8], x: f64) -> f64 {
        c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
    }

    let q = p - 0.5;
    if q.abs() <= SPLIT1 {
        let r = CONST1 - q * q;
        return q * poly(&A, r) / poly(&B, r);
    }
    let r = (-p.ln()).sqrt();
    let z = if r <= SPLIT2 {
        let r = r - CONST2;
        poly(&C, r) / poly(&D, r)
    } else {
        let r = r - SPLIT2;
        poly(&EE, r) / poly(&F, r)
    };
    -z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let flo = f(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (f(mid) > 0.0) == (flo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn trivial_values() {
        assert_eq!(lambert_w(0.0, Branch::Principal).unwrap(), 0.0);
        assert!((lambert_w(E, Branch::Principal).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(lambert_w(-1.0 / E, Branch::Lower).unwrap(), -1.0);
        assert_eq!(lambert_w(-1.0 / E, Branch::Principal).unwrap(), -1.0);
    }

    #[test]
    fn omega_constant_matches_bisection() {
        let oracle = bisect(|t| t * t.exp() - 1.0, 0.0, 1.0);
        assert!((oracle - 0.567_143_290_409_783_8).abs() < 1e-14);
        let w = lambert_w(1.0, Branch::Principal).unwrap();
        assert!((w - oracle).abs() < 1e-14);
    }

    #[test]
    fn lower_branch_matches_bisection() {
        let oracle = bisect(|t| t * t.exp() + 0.1, -10.0, -1.0);
        let w = lambert_w(-0.1, Branch::Lower).unwrap();
        assert!((w - oracle).abs() < 1e-13, "{w} vs {oracle}");
        assert!((w + 3.577_152).abs() < 1e-6);
    }

    #[test]
    fn domain_errors() {
        assert!(lambert_w(-0.4, Branch::Principal).is_err());
        assert!(lambert_w(0.0, Branch::Lower).is_err());
        assert!(lambert_w(1.0, Branch::Lower).is_err());
        assert!(lambert_w(f64::NAN, Branch::Principal).is_err());
        // Rounding just below the branch point is clamped.
        assert_eq!(lambert_w(-1.0 / E - 5e-17, Branch::Principal).unwrap(), -1.0);
    }

    #[test]
    fn residual_contract_both_branches() {
        let mut x = -1.0 / E + 1e-12;
        while x < 1e300 {
            let t = lambert_w(x, Branch::Principal).unwrap();
            assert!(t >= -1.0);
            assert!((t * t.exp() - x).abs() <= 1e-13 * x.abs().max(1.0), "x={x}");
            x = if x < 0.0 { x * 0.7 + 1e-3 } else { x * 1.9 + 1e-3 };
        }
        let mut x = -1.0 / E + 1e-14;
        while x < -1e-300 {
            let t = lambert_w(x, Branch::Lower).unwrap();
            assert!(t <= -1.0);
            assert!((t * t.exp() - x).abs() <= 1e-13 * x.abs().max(1.0), "x={x}");
            x *= 0.5;
        }
    }

    #[test]
    fn log_argument_variants_agree_with_direct() {
        for &l in &[-5.0, 0.0, 3.0, 50.0, 699.0] {
            let a = lambert_w0_exp(l).unwrap();
            let b = lambert_w(l.exp(), Branch::Principal).unwrap();
            assert!((a - b).abs() <= 1e-14 * b.abs().max(1.0));
        }
        // Continuity across the overflow switch.
        let below = lambert_w0_exp(700.0).unwrap();
        let above = lambert_w0_exp(700.0 + 1e-9).unwrap();
        assert!((above - below).abs() < 2e-9);
        let big = lambert_w0_exp(1e6).unwrap();
        assert!((big + big.ln() - 1e6).abs() < 1e-9);

        let below = lambert_wm1_neg_exp(-700.0).unwrap();
        let above = lambert_wm1_neg_exp(-700.0 - 1e-9).unwrap();
        assert!((above - below).abs() < 2e-9);
        let deep = lambert_wm1_neg_exp(-1e5).unwrap();
        assert!(((-deep).ln() + deep + 1e5).abs() < 1e-9);
        assert_eq!(lambert_wm1_neg_exp(-1.0).unwrap(), -1.0);
        assert!(lambert_wm1_neg_exp(-0.5).is_err());
        assert_eq!(lambert_wm1_neg_exp(-1.0 + 1e-16).unwrap(), -1.0);
    }

    #[test]
    fn normal_quantile_examples() {
        assert_eq!(normal_quantile(0.5).unwrap(), 0.0);
        let oracle = bisect(|x| normal_cdf(x) - 0.975, 0.0, 5.0);
        let u = normal_quantile(0.975).unwrap();
        assert!((u - oracle).abs() < 1e-13);
        assert!((u - 1.959_963_984_540_054).abs() < 1e-14);
        assert!((normal_quantile(0.025).unwrap() + u).abs() < 1e-14);
    }

    #[test]
    fn normal_quantile_domain() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(normal_quantile(p).is_err());
        }
    }

    #[test]
    fn normal_quantile_inverts_cdf() {
        let mut p = 1e-300;
        while p < 1.0 {
            let x = normal_quantile(p).unwrap();
            assert!((normal_cdf(x) - p).abs() <= 1e-12, "p={p}");
            if p < 0.5 {
                let rel = (normal_cdf(x) - p).abs() / p;
                assert!(rel < 1e-12, "p={p} rel={rel}");
            }
            p = if p < 0.01 { p * 10.0 } else { p + 0.0123 };
        }
    }
}
