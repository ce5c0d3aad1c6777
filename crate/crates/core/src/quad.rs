//! Distance, time and work integrals of the three regular control phases
//! (full traction, coast, full brake) between two speeds.
//!
//! Integrands are smooth except at the envelope knees `p1/p0` and `q1/q0`,
//! so every integral is split there and each piece handed to adaptive
//! Simpson quadrature.

use crate::dynamics::Train;
use crate::error::{Error, Result};
use crate::numeric::adaptive_simpson;
use serde::{Deserialize, Serialize};

/// Absolute tolerance per integral.
const TOL: f64 = 1e-8;
/// Acceleration integrals are rejected this close to the balance speed.
const SUP_GUARD: f64 = 1e-6;

/// Control phase of a driving strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseKind {
    Accelerate,
    Hold,
    Coast,
    Brake,
}

fn split_integrate(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, knees: &[f64]) -> f64 {
    let mut total = 0.0;
    let mut a = lo;
    let mut cuts: Vec<f64> = knees.iter().copied().filter(|k| *k > lo && *k < hi).collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    for c in cuts {
        total += adaptive_simpson(f, a, c, TOL);
        a = c;
    }
    total + adaptive_simpson(f, a, hi, TOL)
}

fn check_accel_range(train: &Train, v_lo: f64, v_hi: f64) -> Result<()> {
    if !(0.0..=v_hi).contains(&v_lo) {
        return Err(Error::Infeasible(format!("bad acceleration range [{v_lo}, {v_hi}]")));
    }
    if v_hi > train.v_sup() - SUP_GUARD {
        return Err(Error::NearSingular(train.v_sup() - v_hi));
    }
    Ok(())
}

/// Seconds spent under full traction from `v_lo` up to `v_hi`.
pub fn accel_time(train: &Train, v_lo: f64, v_hi: f64) -> Result<f64> {
    check_accel_range(train, v_lo, v_hi)?;
    let f = |v: f64| 1.0 / (train.traction_bound(v) - train.resistance(v));
    Ok(split_integrate(&f, v_lo, v_hi, &[train.traction_knee()]))
}

/// Metres covered under full traction from `v_lo` up to `v_hi`.
pub fn accel_dist(train: &Train, v_lo: f64, v_hi: f64) -> Result<f64> {
    check_accel_range(train, v_lo, v_hi)?;
    let f = |v: f64| v / (train.traction_bound(v) - train.resistance(v));
    Ok(split_integrate(&f, v_lo, v_hi, &[train.traction_knee()]))
}

/// Tractive work per unit mass (J/kg) done accelerating from `v_lo` to `v_hi`.
pub fn accel_work(train: &Train, v_lo: f64, v_hi: f64) -> Result<f64> {
    check_accel_range(train, v_lo, v_hi)?;
    let f = |v: f64| {
        let h = train.traction_bound(v);
        v * h / (h - train.resistance(v))
    };
    Ok(split_integrate(&f, v_lo, v_hi, &[train.traction_knee()]))
}

/// Seconds spent coasting down from `v_hi` to `v_lo`.
pub fn coast_time(train: &Train, v_hi: f64, v_lo: f64) -> Result<f64> {
    if !(v_lo >= 0.0 && v_hi >= v_lo) {
        return Err(Error::Infeasible(format!("bad coast range [{v_hi} -> {v_lo}]")));
    }
    let f = |v: f64| 1.0 / train.resistance(v);
    Ok(adaptive_simpson(&f, v_lo, v_hi, TOL))
}

/// Metres covered coasting down from `v_hi` to `v_lo`.
pub fn coast_dist(train: &Train, v_hi: f64, v_lo: f64) -> Result<f64> {
    if !(v_lo >= 0.0 && v_hi >= v_lo) {
        return Err(Error::Infeasible(format!("bad coast range [{v_hi} -> {v_lo}]")));
    }
    let f = |v: f64| v / train.resistance(v);
    Ok(adaptive_simpson(&f, v_lo, v_hi, TOL))
}

/// Seconds spent under full brake from `v_hi` down to rest.
pub fn brake_time(train: &Train, v_hi: f64) -> Result<f64> {
    brake_time_between(train, v_hi, 0.0)
}

/// Metres covered under full brake from `v_hi` down to rest.
pub fn brake_dist(train: &Train, v_hi: f64) -> Result<f64> {
    brake_dist_between(train, v_hi, 0.0)
}

pub fn brake_time_between(train: &Train, v_hi: f64, v_lo: f64) -> Result<f64> {
    if !(v_lo >= 0.0 && v_hi >= v_lo) {
        return Err(Error::Infeasible(format!("bad brake range [{v_hi} -> {v_lo}]")));
    }
    let f = |v: f64| 1.0 / (train.brake_bound(v) + train.resistance(v));
    Ok(split_integrate(&f, v_lo, v_hi, &[train.brake_knee()]))
}

pub fn brake_dist_between(train: &Train, v_hi: f64, v_lo: f64) -> Result<f64> {
    if !(v_lo >= 0.0 && v_hi >= v_lo) {
        return Err(Error::Infeasible(format!("bad brake range [{v_hi} -> {v_lo}]")));
    }
    let f = |v: f64| v / (train.brake_bound(v) + train.resistance(v));
    Ok(split_integrate(&f, v_lo, v_hi, &[train.brake_knee()]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::TrainParams;
    use approx::assert_relative_eq;

    fn reference() -> Train {
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

    #[test]
    fn launch_to_thirty() {
        let t = reference();
        assert_relative_eq!(accel_time(&t, 0.0, 30.0).unwrap(), 82.91, epsilon = 5e-3);
        assert_relative_eq!(accel_dist(&t, 0.0, 30.0).unwrap(), 1626.11, epsilon = 5e-2);
    }

    #[test]
    fn coast_to_braking_speed() {
        let t = reference();
        let ub = t.u_b(30.0);
        assert_relative_eq!(coast_time(&t, 30.0, ub).unwrap(), 147.33, epsilon = 5e-3);
        assert_relative_eq!(coast_dist(&t, 30.0, ub).unwrap(), 2857.28, epsilon = 5e-2);
    }

    #[test]
    fn empty_intervals_vanish() {
        let t = reference();
        assert_eq!(accel_time(&t, 17.0, 17.0).unwrap(), 0.0);
        assert_eq!(accel_dist(&t, 17.0, 17.0).unwrap(), 0.0);
        assert_eq!(coast_time(&t, 9.0, 9.0).unwrap(), 0.0);
        assert_eq!(brake_time(&t, 0.0).unwrap(), 0.0);
        assert_eq!(brake_dist(&t, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn integrals_add_over_adjacent_ranges() {
        let t = reference();
        let whole = accel_dist(&t, 0.0, 30.0).unwrap();
        let parts = accel_dist(&t, 0.0, 20.0).unwrap() + accel_dist(&t, 20.0, 30.0).unwrap();
        assert_relative_eq!(whole, parts, epsilon = 1e-6);
        let wt = accel_time(&t, 0.0, 30.0).unwrap();
        let pt = accel_time(&t, 0.0, 20.0).unwrap() + accel_time(&t, 20.0, 30.0).unwrap();
        assert_relative_eq!(wt, pt, epsilon = 1e-6);
    }

    #[test]
    fn brake_distance_monotone() {
        let t = reference();
        let mut prev = 0.0;
        for i in 1..=10 {
            let d = brake_dist(&t, 4.0 * i as f64).unwrap();
            assert!(d > prev);
            prev = d;
        }
    }

    #[test]
    fn near_balance_speed_is_rejected() {
        let t = reference();
        let v = t.v_sup() - 1e-8;
        assert!(matches!(accel_time(&t, 0.0, v), Err(Error::NearSingular(_))));
    }

    // dx = v dt: every phase distance equals an independent time-stepped
    // march of the equations of motion
    #[test]
    fn phases_agree_with_ode_march() {
        let t = reference();
        // accelerate 0 -> 30
        let (xt, tt) = march(&t, 0.0, |tr, v| tr.traction_bound(v) - tr.resistance(v), 30.0);
        assert_relative_eq!(accel_dist(&t, 0.0, 30.0).unwrap(), xt, max_relative = 1e-5);
        assert_relative_eq!(accel_time(&t, 0.0, 30.0).unwrap(), tt, max_relative = 1e-5);
        // coast 30 -> 12
        let (xc, tc) = march(&t, 30.0, |tr, v| -tr.resistance(v), 12.0);
        assert_relative_eq!(coast_dist(&t, 30.0, 12.0).unwrap(), xc, max_relative = 1e-5);
        assert_relative_eq!(coast_time(&t, 30.0, 12.0).unwrap(), tc, max_relative = 1e-5);
        // brake 25 -> 5 (stopping exactly at 0 needs an event solve; a
        // nonzero target keeps the march clean)
        let (xb, tb) = march(&t, 25.0, |tr, v| -(tr.brake_bound(v) + tr.resistance(v)), 5.0);
        assert_relative_eq!(brake_dist_between(&t, 25.0, 5.0).unwrap(), xb, max_relative = 1e-5);
        assert_relative_eq!(brake_time_between(&t, 25.0, 5.0).unwrap(), tb, max_relative = 1e-5);
    }

    /// RK4 march of dv/dt = a(v), dx/dt = v until the speed crosses
    /// `v_stop`; linear interpolation inside the final step.
    fn march(t: &Train, v0: f64, acc: impl Fn(&Train, f64) -> f64, v_stop: f64) -> (f64, f64) {
        let dt = 1e-4;
        let (mut v, mut x, mut time) = (v0, 0.0, 0.0);
        let rising = v_stop > v0;
        loop {
            let k1v = acc(t, v);
            let k2v = acc(t, v + 0.5 * dt * k1v);
            let k3v = acc(t, v + 0.5 * dt * k2v);
            let k4v = acc(t, v + dt * k3v);
            let dv = dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            let k1x = v;
            let k2x = v + 0.5 * dt * k1v;
            let k3x = v + 0.5 * dt * k2v;
            let k4x = v + dt * k3v;
            let dx = dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
            let next = v + dv;
            let crossed = if rising { next >= v_stop } else { next <= v_stop };
            if crossed {
                let frac = (v_stop - v) / dv;
                x += dx * frac;
                time += dt * frac;
                return (x, time);
            }
            v = next;
            x += dx;
            time += dt;
        }
    }
}
