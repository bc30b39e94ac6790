//! Derivative-free scalar minimization, bracketed root finding and a small
//! Nelder–Mead simplex search.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Golden section ratio: (3 - sqrt(5)) / 2
const GSR: f64 = 0.381_966_011_250_105_15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
}

/// Brent's golden-section search with parabolic interpolation on `[lo, hi]`.
///
/// Only interior points are evaluated. Non-finite function values are
/// allowed (they read as "worse than anything finite") and force a golden
/// section step. `tol` is the absolute tolerance in `x`; the relative part is
/// `sqrt(f64::EPSILON)` as in the classic `fmin`.
pub fn minimize_scalar<F>(mut f: F, lo: f64, hi: f64, tol: f64, max_iter: usize) -> Result<Minimum>
where
    F: FnMut(f64) -> f64,
{
    if !(lo < hi) {
        return Err(Error::InvalidInput("minimization interval must satisfy lo < hi"));
    }
    let eps = f64::EPSILON.sqrt();
    let (mut a, mut b) = (lo, hi);
    let mut x = a + GSR * (b - a);
    let (mut v, mut w) = (x, x);
    let mut fx = f(x);
    let (mut fv, mut fw) = (fx, fx);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;

    for it in 0..max_iter {
        let xm = 0.5 * (a + b);
        let tol1 = eps * x.abs() + tol / 3.0;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            return Ok(Minimum { x, fx, iterations: it });
        }

        let mut golden = true;
        if e.abs() > tol1 && fx.is_finite() && fw.is_finite() && fv.is_finite() {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if p.abs() < (0.5 * q * etemp).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if xm >= x { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = GSR * e;
        }

        let u = if d.abs() >= tol1 {
            x + d
        } else if d > 0.0 {
            x + tol1
        } else {
            x - tol1
        };
        let fu = f(u);

        if fu <= fx || (fx.is_nan() && !fu.is_nan()) {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Err(Error::NoConvergence { iterations: max_iter })
}

/// Brent–Dekker root finding on a sign-changing bracket `[lo, hi]`.
pub fn find_root<F>(mut f: F, lo: f64, hi: f64, xtol: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::Bracketing { lo, hi });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;

    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Err(Error::NoConvergence { iterations: max_iter })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexResult<const N: usize> {
    pub x: [f64; N],
    pub fx: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Nelder–Mead minimization from `x0` with initial simplex edge `step`.
///
/// Converges when the spread of function values falls below
/// `tol·(1 + |f|)` and the simplex diameter below `sqrt(tol)` relative to the
/// coordinates. Never fails: `converged` is false when the iteration cap was
/// reached, with the best vertex so far returned.
pub fn nelder_mead<F, const N: usize>(
    mut f: F,
    x0: [f64; N],
    step: f64,
    tol: f64,
    max_iter: usize,
) -> SimplexResult<N>
where
    F: FnMut(&[f64; N]) -> f64,
{
    const REFLECT: f64 = 1.0;
    const EXPAND: f64 = 2.0;
    const CONTRACT: f64 = 0.5;
    const SHRINK: f64 = 0.5;

    let mut eval = |x: &[f64; N]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<([f64; N], f64)> = Vec::with_capacity(N + 1);
    simplex.push((x0, eval(&x0)));
    for i in 0..N {
        let mut x = x0;
        x[i] += step;
        let fx = eval(&x);
        simplex.push((x, fx));
    }

    let mut iterations = 0;
    let mut converged = false;
    loop {
        simplex.sort_by(|l, r| l.1.total_cmp(&r.1));
        let (best_x, best_f) = simplex[0];
        let worst_f = simplex[N].1;
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(best_x.iter()).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        let scale = best_x.iter().fold(1.0f64, |m, &c| m.max(1.0 + c.abs()));
        if (worst_f - best_f).abs() <= tol * (1.0 + best_f.abs()) && diameter <= tol.sqrt() * scale {
            converged = true;
            break;
        }
        if iterations == max_iter {
            break;
        }
        iterations += 1;

        let mut centroid = [0.0; N];
        for (x, _) in &simplex[..N] {
            for k in 0..N {
                centroid[k] += x[k] / N as f64;
            }
        }
        let worst = simplex[N].0;
        let toward_worst = |t: f64| {
            let mut out = [0.0; N];
            for k in 0..N {
                out[k] = centroid[k] + t * (worst[k] - centroid[k]);
            }
            out
        };

        let xr = toward_worst(-REFLECT);
        let fr = eval(&xr);
        if fr < best_f {
            let xe = toward_worst(-REFLECT * EXPAND);
            let fe = eval(&xe);
            simplex[N] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[N - 1].1 {
            simplex[N] = (xr, fr);
            continue;
        }
        let xc = if fr < worst_f { toward_worst(-REFLECT * CONTRACT) } else { toward_worst(CONTRACT) };
        let fc = eval(&xc);
        if fc < worst_f.min(fr) {
            simplex[N] = (xc, fc);
            continue;
        }
        for vertex in simplex[1..].iter_mut() {
            for (x, b) in vertex.0.iter_mut().zip(&best_x) {
                *x = b + SHRINK * (*x - b);
            }
            vertex.1 = eval(&vertex.0);
        }
    }
    let (x, fx) = simplex[0];
    SimplexResult { x, fx, iterations, converged }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_parabola() {
        let m = minimize_scalar(|x| (x - 0.3) * (x - 0.3) + 1.0, 0.0, 1.0, 1e-12, 200).unwrap();
        assert!((m.x - 0.3).abs() < 1e-7);
        assert!((m.fx - 1.0).abs() < 1e-14);
    }

    #[test]
    fn minimizer_tolerates_infinite_regions() {
        let f = |x: f64| if x < 0.1 { f64::INFINITY } else { (x - 0.2).powi(2) };
        let m = minimize_scalar(f, 0.0, 1.0, 1e-12, 200).unwrap();
        assert!((m.x - 0.2).abs() < 1e-7);
    }

    #[test]
    fn minimizer_rejects_empty_interval() {
        assert!(minimize_scalar(|x| x, 1.0, 1.0, 1e-9, 10).is_err());
    }

    #[test]
    fn root_of_cubic() {
        let r = find_root(|x| x * x * x - 2.0, 0.0, 2.0, 1e-15, 200).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn root_requires_sign_change() {
        let e = find_root(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 100).unwrap_err();
        assert_eq!(e, Error::Bracketing { lo: -1.0, hi: 1.0 });
    }

    #[test]
    fn simplex_finds_rosenbrock_minimum() {
        let f = |x: &[f64; 2]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
        let r = nelder_mead(f, [-1.2, 1.0], 0.5, 1e-14, 5000);
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-5 && (r.x[1] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn simplex_reports_cap() {
        let f = |x: &[f64; 3]| x.iter().map(|c| (c - 3.0).powi(2)).sum::<f64>();
        let r = nelder_mead(f, [0.0; 3], 0.1, 1e-14, 3);
        assert!(!r.converged);
        assert_eq!(r.iterations, 3);
    }
}
