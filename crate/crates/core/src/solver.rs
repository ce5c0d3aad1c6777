//! Optimal strategies for one train over one inter-stop segment: the
//! minimum-time profile, long-haul and rapid-transit strategies for a
//! single timed section, and multi-section journeys with prescribed
//! intermediate signal times.

use crate::dynamics::Train;
use crate::error::{Error, Result};
use crate::numeric::{bisect, damped_newton};
use crate::quad::{self, PhaseKind};
use crate::strategy::{FinalSectionKind, Phase, SectionOutcome, Strategy};
use nalgebra::DVector;

/// Speeds are kept this far below the balance speed inside iterations.
const SUP_MARGIN: f64 = 2e-4;
/// Residual infinity-norm target for the Newton solves.
const NEWTON_TOL: f64 = 1e-9;
/// Transition-mode sweeps before giving up.
const MODE_SWEEPS: usize = 10;

/// One inter-stop journey with prescribed elapsed times at its interior
/// signals. `times[0]` is zero and the final entry is the pure running
/// time (the scheduler subtracts any dwell before building the spec).
#[derive(Debug, Clone)]
pub struct SegmentSpec {
    pub boundaries: Vec<f64>,
    pub times: Vec<f64>,
}

impl SegmentSpec {
    pub fn new(boundaries: Vec<f64>, times: Vec<f64>) -> Result<Self> {
        if boundaries.len() < 2 || boundaries.len() != times.len() {
            return Err(Error::Infeasible(format!(
                "segment needs matching boundaries/times, got {}/{}",
                boundaries.len(),
                times.len()
            )));
        }
        if times[0] != 0.0 {
            return Err(Error::Infeasible("segment times must start at 0".into()));
        }
        if boundaries.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Infeasible("boundaries must be strictly increasing".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Infeasible("times must be strictly increasing".into()));
        }
        Ok(SegmentSpec { boundaries, times })
    }

    pub fn sections(&self) -> usize {
        self.boundaries.len() - 1
    }

    fn section_lengths(&self) -> Vec<f64> {
        self.boundaries.windows(2).map(|w| w[1] - w[0]).collect()
    }

    fn section_times(&self) -> Vec<f64> {
        self.times.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// Time of the fastest possible journey over `x` metres: full traction to a
/// peak speed, then full brake to rest.
pub fn min_journey_time(train: &Train, x: f64) -> Result<f64> {
    Ok(min_time_profile(train, x)?.0)
}

fn min_time_profile(train: &Train, x: f64) -> Result<(f64, f64)> {
    if x <= 0.0 {
        return Err(Error::Infeasible(format!("distance must be positive, got {x}")));
    }
    let cap = train.v_sup() - SUP_MARGIN;
    let dist = |v: f64| {
        quad::accel_dist(train, 0.0, v).unwrap_or(f64::INFINITY)
            + quad::brake_dist(train, v).unwrap_or(f64::INFINITY)
    };
    if dist(cap) < x {
        return Err(Error::NearSingular(train.v_sup()));
    }
    let peak = bisect(|v| dist(v) - x, 1e-6, cap, 1e-12)
        .ok_or_else(|| Error::Diverged("minimum-time peak speed".into()))?;
    Ok((quad::accel_time(train, 0.0, peak)? + quad::brake_time(train, peak)?, peak))
}

/// Accelerate to `v`, hold, coast to `u_b(v)`, brake. The hold speed is the
/// unique root of the journey-time equation; errors with
/// [`Error::NotLongHaul`] when the hold length at the root is negative.
pub fn solve_long_haul(train: &Train, x: f64, t: f64) -> Result<Strategy> {
    let cap = train.v_sup() - SUP_MARGIN;
    let hold_len = |v: f64| -> Result<f64> {
        let ub = train.u_b(v);
        Ok(x - quad::accel_dist(train, 0.0, v)?
            - quad::coast_dist(train, v, ub)?
            - quad::brake_dist(train, ub)?)
    };
    let journey_time = |v: f64| -> Result<f64> {
        let ub = train.u_b(v);
        Ok(quad::accel_time(train, 0.0, v)?
            + hold_len(v)? / v
            + quad::coast_time(train, v, ub)?
            + quad::brake_time(train, ub)?)
    };
    let f = |v: f64| journey_time(v).map_or(f64::NAN, |tv| tv - t);
    let lo = 1e-3;
    if f(lo) < 0.0 {
        return Err(Error::Infeasible(format!("time {t} s too long for any held profile")));
    }
    if f(cap) > 0.0 {
        return Err(Error::NotLongHaul(hold_len(cap)?));
    }
    let v = bisect(f, lo, cap, 1e-12).ok_or_else(|| Error::Diverged("long-haul hold speed".into()))?;
    let xi = hold_len(v)?;
    if xi < 0.0 {
        return Err(Error::NotLongHaul(xi));
    }
    let spec = SegmentSpec::new(vec![0.0, x], vec![0.0, t])?;
    build_strategy(train, &spec, &Solved::Held { v: vec![v], modes: vec![] })
}

/// Accelerate to a peak, coast, brake; used when the allowed time is too
/// short for a speedhold phase.
pub fn solve_rapid_transit(train: &Train, x: f64, t: f64) -> Result<Strategy> {
    let (t_min, v_peak) = min_time_profile(train, x)?;
    if t < t_min {
        return Err(Error::Infeasible(format!(
            "time {t} s below the minimum feasible {t_min:.3} s"
        )));
    }
    let (v_max, u) = rapid_transit_speeds(train, x, t, v_peak)?;
    let spec = SegmentSpec::new(vec![0.0, x], vec![0.0, t])?;
    build_strategy(train, &spec, &Solved::Rapid { v_max, u })
}

/// Coast-entry speed for a given peak, from the distance constraint. The
/// covered distance decreases strictly in `u`, so this is a clean bisection.
fn rapid_coast_entry(train: &Train, x: f64, v_max: f64) -> Option<f64> {
    let dist = |u: f64| {
        let d = quad::accel_dist(train, 0.0, v_max).ok()?
            + quad::coast_dist(train, v_max, u).ok()?
            + quad::brake_dist(train, u).ok()?;
        Some(d - x)
    };
    let lo = 1e-6;
    let hi = v_max * (1.0 - 1e-12);
    if dist(lo)? < 0.0 || dist(hi)? > 0.0 {
        return None;
    }
    bisect(|u| dist(u).unwrap_or(f64::NAN), lo, hi, 1e-11)
}

fn rapid_transit_speeds(train: &Train, x: f64, t: f64, v_peak: f64) -> Result<(f64, f64)> {
    let hi = v_peak * (1.0 - 1e-9);
    // lower edge of the peak-speed range where the distance constraint is
    // still solvable (coasting almost to rest just covers x)
    let (mut bad, mut good) = (1e-3, hi);
    for _ in 0..60 {
        let mid = 0.5 * (bad + good);
        if rapid_coast_entry(train, x, mid).is_some() {
            good = mid;
        } else {
            bad = mid;
        }
    }
    let journey_time = |v_max: f64| -> Option<f64> {
        let u = rapid_coast_entry(train, x, v_max)?;
        Some(
            quad::accel_time(train, 0.0, v_max).ok()?
                + quad::coast_time(train, v_max, u).ok()?
                + quad::brake_time(train, u).ok()?,
        )
    };
    if journey_time(good).map_or(true, |tv| tv > t) {
        return Err(Error::Diverged(format!(
            "no rapid-transit profile runs {x} m in {t} s"
        )));
    }
    let v_max = bisect(
        |v| journey_time(v).map_or(f64::NAN, |tv| tv - t),
        good,
        hi,
        1e-11,
    )
    .ok_or_else(|| Error::Diverged("rapid-transit peak speed".into()))?;
    let u = rapid_coast_entry(train, x, v_max)
        .ok_or_else(|| Error::Diverged("rapid-transit coast entry".into()))?;
    Ok((v_max, u))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TransMode {
    Accel,
    Coast,
}

/// Signed transition integrals so a fixed-mode Newton iterate may pass
/// through states that violate the assumed speed ordering.
fn trans_time(train: &Train, mode: TransMode, from: f64, to: f64) -> Option<f64> {
    let (lo, hi, sign) = if to >= from { (from, to, 1.0) } else { (to, from, -1.0) };
    let v = match mode {
        TransMode::Accel => quad::accel_time(train, lo, hi).ok()?,
        TransMode::Coast => quad::coast_time(train, hi, lo).ok()?,
    };
    Some(sign * v)
}

fn trans_dist(train: &Train, mode: TransMode, from: f64, to: f64) -> Option<f64> {
    let (lo, hi, sign) = if to >= from { (from, to, 1.0) } else { (to, from, -1.0) };
    let v = match mode {
        TransMode::Accel => quad::accel_dist(train, lo, hi).ok()?,
        TransMode::Coast => quad::coast_dist(train, hi, lo).ok()?,
    };
    Some(sign * v)
}

enum Solved {
    Held { v: Vec<f64>, modes: Vec<TransMode> },
    Unheld { v: Vec<f64>, v_max: f64, u: f64, modes: Vec<TransMode> },
    Rapid { v_max: f64, u: f64 },
}

struct HeldEval {
    residual: DVector<f64>,
    holds: Vec<f64>,
    boundary: Vec<f64>,
}

fn eval_held(
    train: &Train,
    spec: &SegmentSpec,
    modes: &[TransMode],
    v: &[f64],
) -> Option<HeldEval> {
    let n = spec.sections();
    let dx = spec.section_lengths();
    let dt = spec.section_times();
    let boundary: Vec<f64> = (0..n - 1).map(|j| train.u_s(v[j], v[j + 1])).collect();
    let mut residual = DVector::zeros(n);
    let mut holds = vec![0.0; n];
    for j in 0..n {
        let (t_in, d_in) = if j == 0 {
            (quad::accel_time(train, 0.0, v[0]).ok()?, quad::accel_dist(train, 0.0, v[0]).ok()?)
        } else {
            (
                trans_time(train, modes[j - 1], boundary[j - 1], v[j])?,
                trans_dist(train, modes[j - 1], boundary[j - 1], v[j])?,
            )
        };
        let (t_out, d_out) = if j < n - 1 {
            (
                trans_time(train, modes[j], v[j], boundary[j])?,
                trans_dist(train, modes[j], v[j], boundary[j])?,
            )
        } else {
            let ub = train.u_b(v[j]);
            (
                quad::coast_time(train, v[j], ub).ok()? + quad::brake_time(train, ub).ok()?,
                quad::coast_dist(train, v[j], ub).ok()? + quad::brake_dist(train, ub).ok()?,
            )
        };
        let xi = dx[j] - d_in - d_out;
        holds[j] = xi;
        residual[j] = t_in + t_out + xi / v[j] - dt[j];
    }
    Some(HeldEval { residual, holds, boundary })
}

struct UnheldEval {
    residual: DVector<f64>,
    holds: Vec<f64>,
    boundary: Vec<f64>,
}

/// Unknowns are packed as `[v_1 .. v_{n-1}, v_max, u]`.
fn eval_unheld(
    train: &Train,
    spec: &SegmentSpec,
    modes: &[TransMode],
    z: &DVector<f64>,
) -> Option<UnheldEval> {
    let n = spec.sections();
    let held_count = n - 1;
    let dx = spec.section_lengths();
    let dt = spec.section_times();
    let v = &z.as_slice()[..held_count];
    let v_max = z[held_count];
    let u = z[held_count + 1];
    if u <= 0.0 || u >= v_max {
        return None;
    }
    let mut boundary: Vec<f64> = (0..held_count - 1).map(|j| train.u_s(v[j], v[j + 1])).collect();
    let entry = train.u_s_dagger(u, v[held_count - 1], v_max).ok()?;
    if !(entry > 0.0 && entry < train.v_sup() - SUP_MARGIN) {
        return None;
    }
    boundary.push(entry);
    let mut residual = DVector::zeros(n + 1);
    let mut holds = vec![0.0; held_count];
    for j in 0..held_count {
        let (t_in, d_in) = if j == 0 {
            (quad::accel_time(train, 0.0, v[0]).ok()?, quad::accel_dist(train, 0.0, v[0]).ok()?)
        } else {
            (
                trans_time(train, modes[j - 1], boundary[j - 1], v[j])?,
                trans_dist(train, modes[j - 1], boundary[j - 1], v[j])?,
            )
        };
        let mode_out = if j < held_count - 1 { modes[j] } else { TransMode::Accel };
        let t_out = trans_time(train, mode_out, v[j], boundary[j])?;
        let d_out = trans_dist(train, mode_out, v[j], boundary[j])?;
        let xi = dx[j] - d_in - d_out;
        holds[j] = xi;
        residual[j] = t_in + t_out + xi / v[j] - dt[j];
    }
    // final section: accelerate from the entry speed to the peak, coast, brake
    let t_fin = trans_time(train, TransMode::Accel, entry, v_max)?
        + quad::coast_time(train, v_max, u).ok()?
        + quad::brake_time(train, u).ok()?;
    let d_fin = trans_dist(train, TransMode::Accel, entry, v_max)?
        + quad::coast_dist(train, v_max, u).ok()?
        + quad::brake_dist(train, u).ok()?;
    residual[held_count] = t_fin - dt[held_count];
    residual[n] = d_fin - dx[held_count];
    Some(UnheldEval { residual, holds, boundary })
}

fn modes_from_speeds(v: &[f64]) -> Vec<TransMode> {
    v.windows(2)
        .map(|w| if w[1] >= w[0] { TransMode::Accel } else { TransMode::Coast })
        .collect()
}

/// Multi-section journey with prescribed times at every interior boundary.
///
/// Transition modes are assigned from the constant-speed ordering, the
/// section system is solved by a damped Newton iteration, and the modes are
/// reassigned from the solved speeds until the assignment is a fixed point.
/// The final section is first attempted with a speedhold; a negative hold
/// length switches it to the accelerate-coast-brake form.
pub fn solve_timed_sections(train: &Train, spec: &SegmentSpec) -> Result<Strategy> {
    let n = spec.sections();
    if n < 2 {
        let x = spec.boundaries[1] - spec.boundaries[0];
        let t = spec.times[1];
        return match solve_long_haul(train, x, t) {
            Err(Error::NotLongHaul(_)) => solve_rapid_transit(train, x, t),
            other => other,
        };
    }
    let dx = spec.section_lengths();
    let dt = spec.section_times();
    let w: Vec<f64> = dx.iter().zip(&dt).map(|(x, t)| x / t).collect();
    let cap = train.v_sup() - SUP_MARGIN;
    for (j, wj) in w.iter().enumerate() {
        if *wj >= cap {
            return Err(Error::Infeasible(format!(
                "section {} needs mean speed {:.2} m/s at or above the balance speed",
                j + 1,
                wj
            )));
        }
    }
    let mut modes = modes_from_speeds(&w);
    let mut seed_v = w.clone();
    for _sweep in 0..MODE_SWEEPS {
        let solved = solve_with_modes(train, spec, &modes, &seed_v)?;
        let solved_speeds: Vec<f64> = match &solved {
            Solved::Held { v, .. } => v.clone(),
            Solved::Unheld { v, v_max, .. } => {
                let mut s = v.clone();
                s.push(*v_max);
                s
            }
            Solved::Rapid { .. } => unreachable!(),
        };
        let next = modes_from_speeds(&solved_speeds[..n.min(solved_speeds.len())]);
        // an unheld final transition is always acceleration
        let relevant = match &solved {
            Solved::Unheld { .. } => n - 2,
            _ => n - 1,
        };
        if next[..relevant] == modes[..relevant] {
            let solved = match solved {
                Solved::Held { v, .. } => Solved::Held { v, modes: modes.clone() },
                Solved::Unheld { v, v_max, u, .. } => {
                    Solved::Unheld { v, v_max, u, modes: modes.clone() }
                }
                r => r,
            };
            return build_strategy(train, spec, &solved);
        }
        modes = next;
        seed_v = solved_speeds[..n.min(solved_speeds.len())].to_vec();
        seed_v.resize(n, *seed_v.last().unwrap());
    }
    Err(Error::ModeCycling)
}

fn solve_with_modes(
    train: &Train,
    spec: &SegmentSpec,
    modes: &[TransMode],
    seed_v: &[f64],
) -> Result<Solved> {
    let n = spec.sections();
    let cap = train.v_sup() - SUP_MARGIN;
    let clamp = |x: &DVector<f64>| x.iter().all(|v| *v > 0.05 && *v < cap);

    let held_res = |x: &DVector<f64>| eval_held(train, spec, modes, x.as_slice()).map(|e| e.residual);
    let x0 = DVector::from_vec(seed_v.iter().map(|v| v.min(cap - 0.5)).collect());
    let held = damped_newton(&held_res, &clamp, x0, NEWTON_TOL, 50);
    if let Some(res) = held {
        if res.converged {
            let eval = eval_held(train, spec, modes, res.x.as_slice())
                .ok_or_else(|| Error::Diverged("held evaluation at solution".into()))?;
            let interior_ok = eval.holds[..n - 1].iter().all(|xi| *xi >= -1e-9);
            if !interior_ok {
                return Err(Error::Infeasible(
                    "an interior section is too fast for a speedhold phase".into(),
                ));
            }
            if eval.holds[n - 1] >= 0.0 {
                return Ok(Solved::Held { v: res.x.as_slice().to_vec(), modes: modes.to_vec() });
            }
            // fall through: final hold is negative
        }
    }
    solve_unheld(train, spec, modes, seed_v)
}

fn solve_unheld(
    train: &Train,
    spec: &SegmentSpec,
    modes: &[TransMode],
    seed_v: &[f64],
) -> Result<Solved> {
    let n = spec.sections();
    let cap = train.v_sup() - SUP_MARGIN;
    let clamp = |x: &DVector<f64>| x.iter().all(|v| *v > 0.05 && *v < cap);
    let res_fn = |x: &DVector<f64>| eval_unheld(train, spec, modes, x).map(|e| e.residual);
    let w_top = seed_v.iter().cloned().fold(0.0_f64, f64::max);
    for (fw, fu) in [(1.2, 0.55), (1.1, 0.75), (1.35, 0.40), (1.05, 0.90)] {
        let v_max0 = (fw * w_top).min(train.v_sup() - 0.5).max(w_top + 0.3);
        let ub = train.u_b(v_max0);
        let u0 = ub + fu * (v_max0 - ub);
        let mut z0: Vec<f64> = seed_v[..n - 1].to_vec();
        z0.push(v_max0);
        z0.push(u0);
        if let Some(res) = damped_newton(&res_fn, &clamp, DVector::from_vec(z0), NEWTON_TOL, 50) {
            if res.converged {
                let eval = eval_unheld(train, spec, modes, &res.x)
                    .ok_or_else(|| Error::Diverged("unheld evaluation at solution".into()))?;
                if eval.holds.iter().any(|xi| *xi < -1e-9) {
                    return Err(Error::Infeasible(
                        "an interior section is too fast for a speedhold phase".into(),
                    ));
                }
                let held_count = n - 1;
                return Ok(Solved::Unheld {
                    v: res.x.as_slice()[..held_count].to_vec(),
                    v_max: res.x[held_count],
                    u: res.x[held_count + 1],
                    modes: modes.to_vec(),
                });
            }
        }
    }
    Err(Error::Diverged("timed-section Newton failed for every seed".into()))
}

/// Assembles the explicit phase sequence (with switching positions and
/// times) from the solved speeds.
fn build_strategy(train: &Train, spec: &SegmentSpec, solved: &Solved) -> Result<Strategy> {
    let mut phases: Vec<Phase> = Vec::new();
    let mut sections: Vec<SectionOutcome> = Vec::new();
    let mut pos = 0.0;
    let mut time = 0.0;

    let mut push = |kind: PhaseKind, v0: f64, v1: f64, d: f64, t: f64, pos: &mut f64, time: &mut f64| {
        if d.abs() < 1e-12 && t.abs() < 1e-12 {
            return;
        }
        phases.push(Phase {
            kind,
            start_pos: *pos,
            end_pos: *pos + d,
            start_speed: v0,
            end_speed: v1,
            start_time: *time,
            end_time: *time + t,
        });
        *pos += d;
        *time += t;
    };

    match solved {
        Solved::Rapid { v_max, u } => {
            push(
                PhaseKind::Accelerate,
                0.0,
                *v_max,
                quad::accel_dist(train, 0.0, *v_max)?,
                quad::accel_time(train, 0.0, *v_max)?,
                &mut pos,
                &mut time,
            );
            push(
                PhaseKind::Coast,
                *v_max,
                *u,
                quad::coast_dist(train, *v_max, *u)?,
                quad::coast_time(train, *v_max, *u)?,
                &mut pos,
                &mut time,
            );
            push(
                PhaseKind::Brake,
                *u,
                0.0,
                quad::brake_dist(train, *u)?,
                quad::brake_time(train, *u)?,
                &mut pos,
                &mut time,
            );
            sections.push(SectionOutcome { driving_speed: *v_max, boundary_speed: *u, hold_length: 0.0 });
            return Ok(Strategy { phases, sections, final_kind: FinalSectionKind::Unheld });
        }
        Solved::Held { v, modes } => {
            let n = v.len();
            let eval = eval_held(train, spec, modes, v)
                .ok_or_else(|| Error::Diverged("phase assembly".into()))?;
            for j in 0..n {
                // entry transition half (from the boundary speed up/down to v_j)
                if j == 0 {
                    push(
                        PhaseKind::Accelerate,
                        0.0,
                        v[0],
                        quad::accel_dist(train, 0.0, v[0])?,
                        quad::accel_time(train, 0.0, v[0])?,
                        &mut pos,
                        &mut time,
                    );
                } else {
                    let m = modes[j - 1];
                    push(
                        mode_kind(m),
                        eval.boundary[j - 1],
                        v[j],
                        trans_dist(train, m, eval.boundary[j - 1], v[j]).unwrap(),
                        trans_time(train, m, eval.boundary[j - 1], v[j]).unwrap(),
                        &mut pos,
                        &mut time,
                    );
                }
                push(
                    PhaseKind::Hold,
                    v[j],
                    v[j],
                    eval.holds[j].max(0.0),
                    (eval.holds[j] / v[j]).max(0.0),
                    &mut pos,
                    &mut time,
                );
                if j < n - 1 {
                    let m = modes[j];
                    push(
                        mode_kind(m),
                        v[j],
                        eval.boundary[j],
                        trans_dist(train, m, v[j], eval.boundary[j]).unwrap(),
                        trans_time(train, m, v[j], eval.boundary[j]).unwrap(),
                        &mut pos,
                        &mut time,
                    );
                    sections.push(SectionOutcome {
                        driving_speed: v[j],
                        boundary_speed: eval.boundary[j],
                        hold_length: eval.holds[j],
                    });
                } else {
                    let ub = train.u_b(v[j]);
                    push(
                        PhaseKind::Coast,
                        v[j],
                        ub,
                        quad::coast_dist(train, v[j], ub)?,
                        quad::coast_time(train, v[j], ub)?,
                        &mut pos,
                        &mut time,
                    );
                    push(
                        PhaseKind::Brake,
                        ub,
                        0.0,
                        quad::brake_dist(train, ub)?,
                        quad::brake_time(train, ub)?,
                        &mut pos,
                        &mut time,
                    );
                    sections.push(SectionOutcome {
                        driving_speed: v[j],
                        boundary_speed: ub,
                        hold_length: eval.holds[j],
                    });
                }
            }
            Ok(Strategy { phases, sections, final_kind: FinalSectionKind::Held })
        }
        Solved::Unheld { v, v_max, u, modes } => {
            let n = spec.sections();
            let held_count = n - 1;
            let mut z: Vec<f64> = v.clone();
            z.push(*v_max);
            z.push(*u);
            let eval = eval_unheld(train, spec, modes, &DVector::from_vec(z))
                .ok_or_else(|| Error::Diverged("phase assembly".into()))?;
            for j in 0..held_count {
                if j == 0 {
                    push(
                        PhaseKind::Accelerate,
                        0.0,
                        v[0],
                        quad::accel_dist(train, 0.0, v[0])?,
                        quad::accel_time(train, 0.0, v[0])?,
                        &mut pos,
                        &mut time,
                    );
                } else {
                    let m = modes[j - 1];
                    push(
                        mode_kind(m),
                        eval.boundary[j - 1],
                        v[j],
                        trans_dist(train, m, eval.boundary[j - 1], v[j]).unwrap(),
                        trans_time(train, m, eval.boundary[j - 1], v[j]).unwrap(),
                        &mut pos,
                        &mut time,
                    );
                }
                push(
                    PhaseKind::Hold,
                    v[j],
                    v[j],
                    eval.holds[j].max(0.0),
                    (eval.holds[j] / v[j]).max(0.0),
                    &mut pos,
                    &mut time,
                );
                let out_to = eval.boundary[j];
                let m = if j < held_count - 1 { modes[j] } else { TransMode::Accel };
                push(
                    mode_kind(m),
                    v[j],
                    out_to,
                    trans_dist(train, m, v[j], out_to).unwrap(),
                    trans_time(train, m, v[j], out_to).unwrap(),
                    &mut pos,
                    &mut time,
                );
                sections.push(SectionOutcome {
                    driving_speed: v[j],
                    boundary_speed: out_to,
                    hold_length: eval.holds[j],
                });
            }
            let entry = eval.boundary[held_count - 1];
            push(
                PhaseKind::Accelerate,
                entry,
                *v_max,
                quad::accel_dist(train, entry, *v_max)?,
                quad::accel_time(train, entry, *v_max)?,
                &mut pos,
                &mut time,
            );
            push(
                PhaseKind::Coast,
                *v_max,
                *u,
                quad::coast_dist(train, *v_max, *u)?,
                quad::coast_time(train, *v_max, *u)?,
                &mut pos,
                &mut time,
            );
            push(
                PhaseKind::Brake,
                *u,
                0.0,
                quad::brake_dist(train, *u)?,
                quad::brake_time(train, *u)?,
                &mut pos,
                &mut time,
            );
            sections.push(SectionOutcome {
                driving_speed: *v_max,
                boundary_speed: *u,
                hold_length: 0.0,
            });
            Ok(Strategy { phases, sections, final_kind: FinalSectionKind::Unheld })
        }
    }
}

fn mode_kind(m: TransMode) -> PhaseKind {
    match m {
        TransMode::Accel => PhaseKind::Accelerate,
        TransMode::Coast => PhaseKind::Coast,
    }
}

/// Long-haul when the held profile fits, otherwise rapid transit; timed
/// multi-section when interior times are prescribed.
pub fn solve_segment(train: &Train, spec: &SegmentSpec) -> Result<Strategy> {
    solve_timed_sections(train, spec)
}
