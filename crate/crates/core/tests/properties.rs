use std::f64::consts::E;

use dagum_ci_core::estimator::sample_quantile_ratio;
use dagum_ci_core::special_fn::{lambert_w, normal_cdf, normal_quantile, Branch};
use dagum_ci_core::{ratio_of_quantiles, v_from_ratio, DagumParams, RatioSpec};
use proptest::prelude::*;

fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (l0, l1) = (lo.ln(), hi.ln());
    (0..count).map(|i| (l0 + (l1 - l0) * i as f64 / (count - 1) as f64).exp()).collect()
}

#[test]
fn lambert_round_trip_on_log_grid() {
    // Negative part: offsets above -1/e on a log scale; positive part up to 1e6.
    let mut xs: Vec<f64> = log_grid(1e-6, 1.0 / E, 200).into_iter().map(|d| -1.0 / E + d).collect();
    xs.extend(log_grid(1e-12, 1e6, 400));
    for x in xs {
        let t = lambert_w(x, Branch::Principal).unwrap();
        let back = t * t.exp();
        assert!((back - x).abs() <= 1e-12 * x.abs(), "x={x} back={back}");
    }
}

fn ratio_sequence(multiplier: f64) -> Vec<f64> {
    log_grid(1e-1, 1e3, 300)
        .into_iter()
        .map(|z| {
            lambert_w(z, Branch::Principal).unwrap() / lambert_w(multiplier * z, Branch::Principal).unwrap()
        })
        .collect()
}

// d/dz ln(W(z)/W(mz)) = (W(mz) - W(z)) / (z (1 + W(z)) (1 + W(mz))), so the
// ratio rises from 1/m toward 1 when m > 1 and falls toward 1 when m < 1.
#[test]
fn lambert_ratio_monotonicity_in_z() {
    for m in [1.5, 2.0, 10.0] {
        let seq = ratio_sequence(m);
        assert!(seq.windows(2).all(|w| w[1] > w[0]), "multiplier {m}: not increasing");
        assert!(seq.iter().all(|&r| r > 1.0 / m && r < 1.0));
    }
    for m in [0.2, 0.9] {
        let seq = ratio_sequence(m);
        assert!(seq.windows(2).all(|w| w[1] < w[0]), "multiplier {m}: not decreasing");
        assert!(seq.iter().all(|&r| r > 1.0 && r < 1.0 / m));
    }
    assert!(ratio_sequence(1.0).iter().all(|&r| r == 1.0));
}

#[test]
fn normal_quantile_strictly_increasing() {
    let qs: Vec<f64> = (1..=10_000).map(|i| normal_quantile(i as f64 / 10_001.0).unwrap()).collect();
    assert!(qs.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn normal_quantile_antisymmetry_and_inversion() {
    // Dyadic probabilities, so that 1 - p is exact.
    for i in 1..2048 {
        let p = i as f64 / 2048.0;
        let x = normal_quantile(p).unwrap();
        assert!((x + normal_quantile(1.0 - p).unwrap()).abs() <= 1e-14);
        assert!((normal_cdf(x) - p).abs() <= 1e-12);
    }
}

fn params_grid() -> Vec<DagumParams> {
    let mut out = Vec::new();
    for a in [0.1, 0.5, 1.0, 3.0] {
        for v in [1.5, 3.0, 8.0] {
            for l in [0.01, 1.0, 5e4] {
                out.push(DagumParams::new(a, v, l).unwrap());
            }
        }
    }
    out
}

#[test]
fn cdf_quantile_round_trip() {
    let mut qs = vec![1e-6, 1.0 - 1e-6];
    qs.extend((1..=99).map(|i| i as f64 / 100.0));
    for p in params_grid() {
        for &q in &qs {
            let x = p.quantile(q).unwrap();
            let back = p.cdf(x).unwrap();
            assert!((back - q).abs() <= 1e-12, "{p:?} q={q} back={back}");
        }
    }
}

#[test]
fn quantile_scale_equivariance() {
    for a in [0.1, 1.0, 2.0] {
        let unit = DagumParams::new(a, 3.0, 1.0).unwrap();
        for c in [1e-3, 1.0, 1e6] {
            let scaled = DagumParams::new(a, 3.0, c).unwrap();
            for q in [0.05, 0.5, 0.95] {
                let lhs = scaled.quantile(q).unwrap();
                let rhs = c * unit.quantile(q).unwrap();
                assert!((lhs - rhs).abs() <= 4.0 * f64::EPSILON * rhs);
            }
        }
    }
}

/// Composite Gauss–Legendre (5 points) in `ln x`, which handles the
/// heavy right tail and the power-law behaviour near zero.
fn integrate_log_space(f: impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
    const NODES: [f64; 5] = [
        0.0,
        -0.538_469_310_105_683_1,
        0.538_469_310_105_683_1,
        -0.906_179_845_938_664,
        0.906_179_845_938_664,
    ];
    const WEIGHTS: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let (l0, l1) = (lo.ln(), hi.ln());
    let h = (l1 - l0) / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let mid = l0 + (k as f64 + 0.5) * h;
        for (x, w) in NODES.iter().zip(WEIGHTS) {
            let t = mid + 0.5 * h * x;
            let u = t.exp();
            total += w * 0.5 * h * f(u) * u;
        }
    }
    total
}

#[test]
fn pdf_integrates_to_one() {
    for p in params_grid() {
        let hi = p.quantile(1.0 - 1e-9).unwrap();
        // Mass below the lower cut is cdf(lo), negligible at 1e-14 probability.
        let lo = p.quantile(1e-14).unwrap();
        let mass = integrate_log_space(|x| p.pdf(x).unwrap(), lo, hi, 4000);
        assert!((mass - 1.0).abs() <= 1e-6, "{p:?} mass={mass}");
    }
}

fn ks_statistic(mut values: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    values
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn sampled_values_follow_the_cdf() {
    let p = DagumParams::new(0.5, 3.0, 2.0).unwrap();
    let draws = p.sample(100_000, 20_240_501).unwrap();
    let d = ks_statistic(draws, |x| p.cdf(x).unwrap());
    assert!(d < 0.006, "KS = {d}");
}

#[test]
fn ratio_independent_of_scale() {
    let spec = RatioSpec::QUINTILE;
    let base = ratio_of_quantiles(&DagumParams::new(0.4, 2.2, 1.0).unwrap(), &spec);
    for l in [1e-4, 3.0, 1e8] {
        let r = ratio_of_quantiles(&DagumParams::new(0.4, 2.2, l).unwrap(), &spec);
        assert!((r - base).abs() <= 1e-14 * base);
    }
}

proptest! {
    #[test]
    fn lambert_principal_round_trip(x in -0.3678794411714423f64..1e8) {
        let t = lambert_w(x, Branch::Principal).unwrap();
        prop_assert!(t >= -1.0);
        prop_assert!((t * t.exp() - x).abs() <= 1e-13 * x.abs().max(1.0));
    }

    #[test]
    fn lambert_lower_round_trip(x in -0.3678794411714423f64..-1e-200) {
        let t = lambert_w(x, Branch::Lower).unwrap();
        prop_assert!(t <= -1.0);
        prop_assert!((t * t.exp() - x).abs() <= 1e-13 * x.abs().max(1.0));
    }

    #[test]
    fn v_from_ratio_inverts_ratio(a in 0.05f64..5.0, v in 0.3f64..20.0, alpha in 0.01f64..0.49, gap in 0.02f64..0.49) {
        let spec = RatioSpec::new(alpha, alpha + gap).unwrap();
        let p = DagumParams::new(a, v, 1.0).unwrap();
        let r = ratio_of_quantiles(&p, &spec);
        prop_assert!(r > 1.0);
        let back = v_from_ratio(a, &spec, r).unwrap();
        prop_assert!((back - v).abs() <= 1e-10 * v);
        let direct = p.quantile(spec.beta()).unwrap() / p.quantile(spec.alpha()).unwrap();
        prop_assert!((direct - r).abs() <= 1e-10 * r);
    }

    #[test]
    fn quantile_is_increasing(a in 0.05f64..5.0, v in 0.3f64..20.0, q in 0.001f64..0.998) {
        let p = DagumParams::new(a, v, 1.0).unwrap();
        prop_assert!(p.quantile(q + 0.001).unwrap() > p.quantile(q).unwrap());
    }

    #[test]
    fn sample_ratio_ignores_order(mut data in prop::collection::vec(0.01f64..1e6, 5..200), seed in any::<u64>()) {
        let spec = RatioSpec::QUINTILE;
        let before = sample_quantile_ratio(&data, &spec).unwrap();
        // Deterministic shuffle driven by the seed.
        let mut s = seed | 1;
        for i in (1..data.len()).rev() {
            s ^= s << 13; s ^= s >> 7; s ^= s << 17;
            data.swap(i, (s % (i as u64 + 1)) as usize);
        }
        prop_assert_eq!(sample_quantile_ratio(&data, &spec).unwrap(), before);
        let mut sorted = data.clone();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let expect = sorted[(0.8 * n as f64).floor() as usize] / sorted[(0.2 * n as f64).floor() as usize];
        prop_assert_eq!(before, expect);
    }
}
