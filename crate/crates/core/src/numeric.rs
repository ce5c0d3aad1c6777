//! Small numerical kernels shared by the solvers: adaptive Simpson
//! quadrature, bracketed root finding, a damped multivariate Newton
//! iteration and golden-section line search.

use nalgebra::{DMatrix, DVector};

/// Adaptive Simpson quadrature to an absolute tolerance.
///
/// The integrand must be finite on `[a, b]`; callers split at derivative
/// kinks before integrating.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Newton iteration safeguarded by a shrinking bracket; falls back to
/// bisection whenever the Newton step leaves the bracket.
pub fn bracketed_newton(
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    xtol: f64,
) -> Option<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fx = f(x);
        if fx == 0.0 {
            return Some(x);
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        let d = df(x);
        let newton = x - fx / d;
        x = if d != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (hi - lo).abs() < xtol {
            return Some(x);
        }
    }
    Some(x)
}

/// Bisection with a secant refinement step; assumes `f(lo)` and `f(hi)`
/// bracket a root.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, xtol: f64) -> Option<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fmid = f(mid);
        if fmid == 0.0 || (hi - lo).abs() < xtol {
            return Some(mid);
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Outcome of [`damped_newton`].
pub struct NewtonResult {
    pub x: DVector<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Damped Newton for square systems with a finite-difference Jacobian.
///
/// Steps are halved while the residual norm fails to decrease or `clamp`
/// rejects the iterate. Converges on the residual infinity norm.
pub fn damped_newton(
    residual: &dyn Fn(&DVector<f64>) -> Option<DVector<f64>>,
    clamp: &dyn Fn(&DVector<f64>) -> bool,
    x0: DVector<f64>,
    tol: f64,
    max_iter: usize,
) -> Option<NewtonResult> {
    let n = x0.len();
    let mut x = x0;
    let mut r = residual(&x)?;
    for it in 0..max_iter {
        let rnorm = r.amax();
        if rnorm < tol {
            return Some(NewtonResult { x, residual_norm: rnorm, iterations: it, converged: true });
        }
        // forward differences are accurate enough for a residual-based stop
        let mut jac = DMatrix::zeros(n, n);
        for k in 0..n {
            let h = 1e-6 * x[k].abs().max(1.0);
            let mut xp = x.clone();
            xp[k] += h;
            let mut xm = x.clone();
            xm[k] -= h;
            let (rp, rm) = (residual(&xp)?, residual(&xm)?);
            for i in 0..n {
                jac[(i, k)] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        let step = jac.lu().solve(&(-&r))?;
        let base = r.norm();
        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda > 1e-8 {
            let cand = &x + lambda * &step;
            if clamp(&cand) {
                if let Some(rc) = residual(&cand) {
                    if rc.norm() < base || rc.amax() < tol {
                        x = cand;
                        r = rc;
                        accepted = true;
                        break;
                    }
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Some(NewtonResult {
                x,
                residual_norm: r.amax(),
                iterations: it,
                converged: false,
            });
        }
    }
    let rnorm = r.amax();
    Some(NewtonResult { x, residual_norm: rnorm, iterations: max_iter, converged: rnorm < tol })
}

/// Golden-section search for the minimum of a unimodal `f` on `[a, b]`.
/// Returns `(x_min, f_min)` after `iters` interval reductions.
pub fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    if fc < fd {
        (x, fc)
    } else {
        (x, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn simpson_polynomial_is_exact() {
        let f = |x: f64| 3.0 * x * x;
        assert_relative_eq!(adaptive_simpson(&f, 0.0, 2.0, 1e-10), 8.0, epsilon = 1e-9);
    }

    #[test]
    fn simpson_smooth_function() {
        let f = |x: f64| (x).exp();
        let exact = 1.0f64.exp() - 1.0;
        assert_relative_eq!(adaptive_simpson(&f, 0.0, 1.0, 1e-10), exact, epsilon = 1e-9);
    }

    #[test]
    fn newton_finds_sqrt() {
        let r = bracketed_newton(|x| x * x - 2.0, |x| 2.0 * x, 0.0, 2.0, 1e-14).unwrap();
        assert_relative_eq!(r, 2.0f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn golden_finds_parabola_min() {
        let (x, _) = golden_section(|x| (x - 1.3).powi(2), 0.0, 4.0, 60);
        assert_relative_eq!(x, 1.3, epsilon = 1e-6);
    }

    #[test]
    fn damped_newton_solves_2d() {
        let residual = |x: &DVector<f64>| {
            Some(DVector::from_vec(vec![x[0] * x[0] + x[1] - 3.0, x[0] - x[1]]))
        };
        let res = damped_newton(
            &residual,
            &|_| true,
            DVector::from_vec(vec![2.0, 0.5]),
            1e-12,
            50,
        )
        .unwrap();
        assert!(res.converged);
        assert_relative_eq!(res.x[0], res.x[1], epsilon = 1e-10);
    }
}
