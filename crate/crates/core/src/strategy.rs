//! Driving strategies: the phase sequence produced by the solvers, its
//! energy cost, and profile sampling for export.

use crate::dynamics::Train;
use crate::error::Result;
use crate::quad::{self, PhaseKind};
use serde::{Deserialize, Serialize};

/// One control phase with its speed, position and time span. Positions and
/// times are relative to the start of the segment the strategy was solved
/// on.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Phase {
    pub kind: PhaseKind,
    pub start_pos: f64,
    pub end_pos: f64,
    pub start_speed: f64,
    pub end_speed: f64,
    pub start_time: f64,
    pub end_time: f64,
}

/// How the last section before the final stop is driven.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FinalSectionKind {
    /// Speedhold at the driving speed, coast to `u_b` and brake.
    Held,
    /// No time for a hold: accelerate to a peak, coast and brake.
    Unheld,
}

/// Per-section summary of the solved strategy.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SectionOutcome {
    /// Hold speed of the section, or the acceleration peak when the final
    /// section has no hold phase.
    pub driving_speed: f64,
    /// Speed at the section's right boundary. For the final section this is
    /// the coast-to-brake switching speed.
    pub boundary_speed: f64,
    /// Length of the speedhold interval (m); zero when unheld.
    pub hold_length: f64,
}

/// A complete strategy of optimal type over one inter-stop segment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Strategy {
    pub phases: Vec<Phase>,
    pub sections: Vec<SectionOutcome>,
    pub final_kind: FinalSectionKind,
}

/// Net tractive energy per unit mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyCost {
    pub joules_per_kg: f64,
}

impl Strategy {
    pub fn total_distance(&self) -> f64 {
        self.phases.last().map_or(0.0, |p| p.end_pos)
    }

    pub fn total_time(&self) -> f64 {
        self.phases.last().map_or(0.0, |p| p.end_time)
    }

    /// Checks that consecutive phases chain exactly and that distances and
    /// times are self-consistent. Used by tests and by the export path.
    pub fn validate_chain(&self, tol: f64) -> bool {
        self.phases.windows(2).all(|w| {
            (w[0].end_pos - w[1].start_pos).abs() < tol
                && (w[0].end_speed - w[1].start_speed).abs() < 1e-9
                && (w[0].end_time - w[1].start_time).abs() < tol
        })
    }
}

/// Energy cost of a strategy: tractive work while accelerating plus the
/// work against resistance on each hold; coast and brake phases cost
/// nothing.
pub fn strategy_cost(train: &Train, strategy: &Strategy) -> Result<StrategyCost> {
    let mut total = 0.0;
    for p in &strategy.phases {
        match p.kind {
            PhaseKind::Accelerate => {
                total += quad::accel_work(train, p.start_speed, p.end_speed)?;
            }
            PhaseKind::Hold => {
                total += train.resistance(p.start_speed) * (p.end_pos - p.start_pos);
            }
            PhaseKind::Coast | PhaseKind::Brake => {}
        }
    }
    Ok(StrategyCost { joules_per_kg: total })
}

/// A sampled point of the speed profile.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub position: f64,
    pub speed: f64,
    pub time: f64,
    pub phase: PhaseKind,
}

/// Samples the profile at no more than `spacing` metres between points.
pub fn sample_profile(train: &Train, strategy: &Strategy, spacing: f64) -> Result<Vec<ProfilePoint>> {
    let mut out = Vec::new();
    for p in &strategy.phases {
        let len = p.end_pos - p.start_pos;
        if len <= 0.0 {
            continue;
        }
        if matches!(p.kind, PhaseKind::Hold) {
            let steps = (len / spacing).ceil() as usize;
            for i in 0..steps {
                let frac = i as f64 / steps as f64;
                out.push(ProfilePoint {
                    position: p.start_pos + frac * len,
                    speed: p.start_speed,
                    time: p.start_time + frac * (p.end_time - p.start_time),
                    phase: p.kind,
                });
            }
            continue;
        }
        // march in speed, choosing dv so each step spans <= spacing metres
        let (mut v, mut x, mut t) = (p.start_speed, p.start_pos, p.start_time);
        let dir = if p.end_speed >= p.start_speed { 1.0 } else { -1.0 };
        let accel = |v: f64| match p.kind {
            PhaseKind::Accelerate => train.traction_bound(v) - train.resistance(v),
            PhaseKind::Coast => -train.resistance(v),
            PhaseKind::Brake => -(train.brake_bound(v) + train.resistance(v)),
            PhaseKind::Hold => unreachable!(),
        };
        let mut guard = 0usize;
        while (p.end_speed - v) * dir > 1e-9 && guard < 1_000_000 {
            guard += 1;
            out.push(ProfilePoint { position: x, speed: v, time: t, phase: p.kind });
            let a = accel(v).abs().max(1e-6);
            let dv = (spacing * a / v.max(0.5)).min((p.end_speed - v).abs()).max(1e-4);
            let v_next = v + dir * dv;
            let (lo, hi) = if dir > 0.0 { (v, v_next) } else { (v_next, v) };
            let (dx, dt) = match p.kind {
                PhaseKind::Accelerate => {
                    (quad::accel_dist(train, lo, hi)?, quad::accel_time(train, lo, hi)?)
                }
                PhaseKind::Coast => {
                    (quad::coast_dist(train, hi, lo)?, quad::coast_time(train, hi, lo)?)
                }
                PhaseKind::Brake => (
                    quad::brake_dist_between(train, hi, lo)?,
                    quad::brake_time_between(train, hi, lo)?,
                ),
                PhaseKind::Hold => unreachable!(),
            };
            x += dx;
            t += dt;
            v = v_next;
        }
    }
    if let Some(last) = strategy.phases.last() {
        out.push(ProfilePoint {
            position: last.end_pos,
            speed: last.end_speed,
            time: last.end_time,
            phase: last.kind,
        });
    }
    Ok(out)
}

/// Writes the sampled profile as CSV rows `position,speed,time,phase`.
pub fn profile_csv(points: &[ProfilePoint]) -> String {
    let mut s = String::from("position_m,speed_ms,time_s,phase\n");
    for p in points {
        let label = match p.phase {
            PhaseKind::Accelerate => "accelerate",
            PhaseKind::Hold => "hold",
            PhaseKind::Coast => "coast",
            PhaseKind::Brake => "brake",
        };
        s.push_str(&format!("{:.3},{:.6},{:.6},{}\n", p.position, p.speed, p.time, label));
    }
    s
}
