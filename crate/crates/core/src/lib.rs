//! Energy-optimal driving strategies and safe-separation timetables for a
//! fleet of trains sharing a signalled level track.
//!
//! The crate has three layers:
//!
//! * per-train physics and optimal strategies ([`dynamics`], [`quad`],
//!   [`strategy`], [`solver`]),
//! * fleet scheduling under active clearance-time constraints ([`table`],
//!   [`cs`], [`fleet`]),
//! * robustness analysis of the resulting timetables ([`stochastic`]).
//!
//! File formats, plotting and the command-line pipeline live in [`config`],
//! [`plot`] and [`cli`].

pub mod cli;
pub mod config;
pub mod cs;
pub mod dynamics;
pub mod error;
pub mod fleet;
pub mod numeric;
pub mod plot;
pub mod quad;
pub mod solver;
pub mod stochastic;
pub mod strategy;
pub mod table;

pub use dynamics::{Train, TrainParams};
pub use error::{Error, Result};
pub use solver::SegmentSpec;
pub use strategy::{Strategy, StrategyCost};
pub use table::{ConstraintTable, TimeExpr, Track};
