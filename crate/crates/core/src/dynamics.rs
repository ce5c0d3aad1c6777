//! Per-train performance functions: traction and brake envelopes, Davis
//! resistance, and the switching-speed formulas derived from them.

use crate::error::{Error, Result};
use crate::numeric;
use serde::{Deserialize, Serialize};

/// Raw performance coefficients for one train, all SI and per unit mass.
///
/// Traction is limited by `min(p0, p1/v)`, braking by `min(q0, q1/v)`
/// (stored as magnitudes), and resistance is `r0 + r1*v + r2*v^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainParams {
    /// Max acceleration plateau (m/s^2).
    pub p0: f64,
    /// Power-limited acceleration numerator (m^2/s^3).
    pub p1: f64,
    /// Max brake plateau (m/s^2).
    pub q0: f64,
    /// Power-limited brake numerator (m^2/s^3).
    pub q1: f64,
    /// Static resistance (m/s^2).
    pub r0: f64,
    /// Linear resistance coefficient (1/s).
    pub r1: f64,
    /// Quadratic resistance coefficient (1/m).
    pub r2: f64,
}

impl TrainParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("p0", self.p0),
            ("p1", self.p1),
            ("q0", self.q0),
            ("q1", self.q1),
            ("r0", self.r0),
            ("r2", self.r2),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be > 0, got {v}")));
            }
        }
        // r1 = 0 is a valid Davis fit for some stock
        if !(self.r1 >= 0.0) || !self.r1.is_finite() {
            return Err(Error::InvalidParams(format!("r1 must be >= 0, got {}", self.r1)));
        }
        Ok(())
    }
}

/// A validated train model with its balance speed pre-solved.
#[derive(Debug, Clone, Copy)]
pub struct Train {
    params: TrainParams,
    v_sup: f64,
}

impl Train {
    /// Validates the coefficients and solves `H(v) = r(v)` for the balance
    /// speed. Fails with [`Error::NoRoot`] if resistance never catches the
    /// traction envelope on `[p1/p0, 200]` m/s.
    pub fn new(params: TrainParams) -> Result<Self> {
        params.validate()?;
        let f = |v: f64| params.p1 / v - (params.r0 + params.r1 * v + params.r2 * v * v);
        let lo = params.p1 / params.p0;
        let hi = 200.0;
        if f(lo) <= 0.0 || f(hi) >= 0.0 {
            return Err(Error::NoRoot);
        }
        let v_sup = numeric::bracketed_newton(
            f,
            |v| -params.p1 / (v * v) - (params.r1 + 2.0 * params.r2 * v),
            lo,
            hi,
            1e-12,
        )
        .ok_or(Error::NoRoot)?;
        Ok(Train { params, v_sup })
    }

    pub fn params(&self) -> &TrainParams {
        &self.params
    }

    /// Supremum of sustainable speeds; `|H(v_sup) - r(v_sup)| < 1e-9`.
    pub fn v_sup(&self) -> f64 {
        self.v_sup
    }

    /// Speed where the traction envelope switches from plateau to power limit.
    pub fn traction_knee(&self) -> f64 {
        self.params.p1 / self.params.p0
    }

    /// Speed where the brake envelope switches from plateau to power limit.
    pub fn brake_knee(&self) -> f64 {
        self.params.q1 / self.params.q0
    }

    /// Maximum tractive acceleration `min(p0, p1/v)`; the plateau governs
    /// launch at `v = 0`.
    pub fn traction_bound(&self, v: f64) -> f64 {
        if v <= 0.0 {
            self.params.p0
        } else {
            self.params.p0.min(self.params.p1 / v)
        }
    }

    /// Maximum braking deceleration magnitude `min(q0, q1/v)`.
    pub fn brake_bound(&self, v: f64) -> f64 {
        if v <= 0.0 {
            self.params.q0
        } else {
            self.params.q0.min(self.params.q1 / v)
        }
    }

    /// Resistive deceleration `r0 + r1*v + r2*v^2`.
    pub fn resistance(&self, v: f64) -> f64 {
        self.params.r0 + self.params.r1 * v + self.params.r2 * v * v
    }

    /// `r'(v)`.
    pub fn resistance_slope(&self, v: f64) -> f64 {
        self.params.r1 + 2.0 * self.params.r2 * v
    }

    /// Resistive power per unit mass, `phi(v) = v r(v)`. Strictly convex.
    pub fn phi(&self, v: f64) -> f64 {
        v * self.resistance(v)
    }

    /// `phi'(v) = r0 + 2 r1 v + 3 r2 v^2`.
    pub fn phi_prime(&self, v: f64) -> f64 {
        self.params.r0 + 2.0 * self.params.r1 * v + 3.0 * self.params.r2 * v * v
    }

    /// `phi''(v) = 2 r1 + 6 r2 v`.
    pub fn phi_second(&self, v: f64) -> f64 {
        2.0 * self.params.r1 + 6.0 * self.params.r2 * v
    }

    /// Marginal cost rate `psi(v) = v^2 r'(v)`, strictly increasing.
    /// Differences of `psi` across a signal give the cost gradient with
    /// respect to that signal's prescribed time.
    pub fn psi(&self, v: f64) -> f64 {
        v * v * self.resistance_slope(v)
    }

    /// `psi'(v) = 2 r1 v + 6 r2 v^2`.
    pub fn psi_prime(&self, v: f64) -> f64 {
        2.0 * self.params.r1 * v + 6.0 * self.params.r2 * v * v
    }

    /// Optimal braking speed: coast ends and full brake begins at
    /// `u_b(v) = psi(v) / phi'(v)`, strictly inside `(0, v)`.
    pub fn u_b(&self, v: f64) -> f64 {
        self.psi(v) / self.phi_prime(v)
    }

    /// Optimal boundary speed between speedhold phases at `v` and `w`:
    /// `[psi(v) - psi(w)] / [phi'(v) - phi'(w)]`, strictly between them.
    ///
    /// Near-degenerate inputs (`|v - w| < 1e-7`) take the continuous limit
    /// `psi'(v) / phi''(v)` instead of evaluating 0/0.
    pub fn u_s(&self, v: f64, w: f64) -> f64 {
        if (v - w).abs() < 1e-7 {
            return self.psi_prime(v) / self.phi_second(v);
        }
        (self.psi(v) - self.psi(w)) / (self.phi_prime(v) - self.phi_prime(w))
    }

    /// Boundary speed into a final section with no speedhold phase: the
    /// train accelerates through the boundary to a peak `w`, coasts to `u`
    /// and brakes. Requires `u` in `[u_b(w), w)`; at `u = u_b(w)` this
    /// reduces to [`Train::u_s`]`(v, w)`.
    pub fn u_s_dagger(&self, u: f64, v: f64, w: f64) -> Result<f64> {
        let lo = self.u_b(w);
        if !(u >= lo - 1e-9 && u < w) {
            return Err(Error::OutOfRange { u, lo, hi: w });
        }
        let lambda = self.phi(w) / (w - u);
        Ok((lambda * u - self.psi(v)) / (lambda - self.phi_prime(v)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    pub fn reference() -> Train {
        Train::new(TrainParams {
            p0: 0.84,
            p1: 9.10,
            q0: 1.00,
            q1: 10.83,
            r0: 0.12,
            r1: 0.0001,
            r2: 0.00004,
        })
        .unwrap()
    }

    fn alternative() -> Train {
        Train::new(TrainParams {
            p0: 1.00,
            p1: 7.00,
            q0: 1.50,
            q1: 9.00,
            r0: 0.070,
            r1: 0.0,
            r2: 0.00005,
        })
        .unwrap()
    }

    #[test]
    fn traction_envelope() {
        let t = reference();
        assert_relative_eq!(t.traction_bound(5.0), 0.84);
        assert_relative_eq!(t.traction_bound(30.0), 9.10 / 30.0, max_relative = 1e-12);
        // continuity at the knee
        assert_relative_eq!(t.traction_bound(9.10 / 0.84), 0.84, max_relative = 1e-12);
        assert_relative_eq!(t.traction_bound(0.0), 0.84);
    }

    #[test]
    fn resistance_curve() {
        let t = reference();
        assert_relative_eq!(t.resistance(0.0), 0.12);
        assert_relative_eq!(t.resistance(30.0), 0.159, max_relative = 1e-12);
        let a = alternative();
        assert_relative_eq!(a.resistance(20.0), 0.09, max_relative = 1e-12);
    }

    #[test]
    fn balance_speed() {
        let t = reference();
        assert_relative_eq!(t.v_sup(), 44.6011, epsilon = 1e-3);
        assert!((t.traction_bound(t.v_sup()) - t.resistance(t.v_sup())).abs() < 1e-9);
        // oracle: plain bisection on the alternative train
        let a = alternative();
        let f = |v: f64| 7.0 / v - (0.07 + 0.00005 * v * v);
        let (mut lo, mut hi) = (7.0, 200.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert_relative_eq!(a.v_sup(), 0.5 * (lo + hi), epsilon = 1e-9);
        assert_relative_eq!(a.v_sup(), 43.042143488, epsilon = 1e-6);
    }

    #[test]
    fn balance_speed_grows_with_power() {
        let mut p = *reference().params();
        let base = Train::new(p).unwrap().v_sup();
        p.p1 *= 2.0;
        assert!(Train::new(p).unwrap().v_sup() > base);
    }

    #[test]
    fn no_root_when_resistance_dominates() {
        let err = Train::new(TrainParams {
            p0: 0.1,
            p1: 0.5,
            q0: 1.0,
            q1: 10.0,
            r0: 10.0,
            r1: 0.0,
            r2: 0.1,
        });
        assert!(matches!(err, Err(Error::NoRoot)));
    }

    #[test]
    fn braking_speed() {
        let t = reference();
        assert_relative_eq!(t.u_b(30.0), 9.62, epsilon = 5e-3);
        assert_relative_eq!(t.u_b(41.2507), 17.4032, epsilon = 1e-4);
        // pure quadratic-plus-static resistance has a closed form
        let a = alternative();
        let v: f64 = 27.0;
        let closed = 2.0 * 0.00005 * v.powi(3) / (0.07 + 3.0 * 0.00005 * v * v);
        assert_relative_eq!(a.u_b(v), closed, max_relative = 1e-12);
    }

    #[test]
    fn switching_speed() {
        let t = reference();
        assert_relative_eq!(t.u_s(22.9024, 15.9710), 19.6342, epsilon = 1e-4);
        assert_relative_eq!(t.u_s(15.9710, 34.5262), 26.3486, epsilon = 1e-4);
        // symmetric in its arguments
        assert_relative_eq!(t.u_s(17.0, 29.0), t.u_s(29.0, 17.0), max_relative = 1e-12);
        // degenerate limit is continuous
        let lim = t.u_s(25.0, 25.0);
        assert_relative_eq!(t.u_s(25.0, 25.0 + 1e-5), lim, epsilon = 1e-4);
    }

    #[test]
    fn switching_speed_no_hold() {
        let t = reference();
        // solved boundary state for a two-section journey with a tight
        // second section; see the solver tests for the full journey
        let u12 = t.u_s_dagger(23.8935, 17.4819, 41.2937).unwrap();
        assert_relative_eq!(u12, 35.2648, epsilon = 1e-3);
        let u32 = t.u_s_dagger(20.6766, 18.3070, 40.6212).unwrap();
        assert_relative_eq!(u32, 33.5071, epsilon = 1e-3);
        // reduces to u_s at the lower endpoint
        let (v, w) = (22.9, 34.5262);
        let at_edge = t.u_s_dagger(t.u_b(w), v, w).unwrap();
        assert_relative_eq!(at_edge, t.u_s(v, w), epsilon = 1e-9);
        assert!(t.u_s_dagger(2.0, 20.0, 30.0).is_err());
        assert!(t.u_s_dagger(30.0, 20.0, 30.0).is_err());
    }

    #[test]
    fn monotone_auxiliaries() {
        let t = reference();
        let vsup = t.v_sup();
        let n = 200;
        for i in 1..n {
            let v = vsup * i as f64 / n as f64;
            let w = vsup * (i + 1) as f64 / n as f64;
            assert!(t.psi(v) < t.psi(w), "psi not increasing at {v}");
            assert!(t.u_b(v) > 0.0 && t.u_b(v) < v, "u_b outside (0, v) at {v}");
            // finite-difference convexity of phi
            let h = 1e-3;
            let dd = t.phi(v + h) - 2.0 * t.phi(v) + t.phi(v - h);
            assert!(dd >= 0.0, "phi not convex at {v}");
        }
    }

    #[test]
    fn u_s_between_arguments() {
        let t = reference();
        for &(v, w) in &[(10.0, 35.0), (35.0, 10.0), (20.0, 21.0), (40.0, 12.0)] {
            let u = t.u_s(v, w);
            assert!(u > v.min(w) && u < v.max(w), "u_s({v},{w}) = {u}");
        }
    }
}
