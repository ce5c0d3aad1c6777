use thiserror::Error;

/// Errors produced by the solvers, schedulers and file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid train parameters: {0}")]
    InvalidParams(String),

    #[error("traction never balances resistance on the search bracket")]
    NoRoot,

    #[error("speeds too close to define a switching speed ({0} vs {1})")]
    DegenerateSpeeds(f64, f64),

    #[error("coast entry speed {u} outside [{lo}, {hi})")]
    OutOfRange { u: f64, lo: f64, hi: f64 },

    #[error("acceleration integral within {0} m/s of the balance speed")]
    NearSingular(f64),

    #[error("hold length would be negative ({0} m); not a long-haul regime")]
    NotLongHaul(f64),

    #[error("iteration failed to converge: {0}")]
    Diverged(String),

    #[error("infeasible timing: {0}")]
    Infeasible(String),

    #[error("transition-mode assignment did not reach a fixed point")]
    ModeCycling,

    #[error("full constraint pattern requires at most floor(n/2) trains (m={m}, n={n})")]
    Unsupported { m: usize, n: usize },

    #[error("cell ({0}, {1}) references unknown h{2}")]
    DanglingReference(String, String, usize),

    #[error("table is missing cells: {0}")]
    Incomplete(String),

    #[error("time vector has length {got}, table needs {want}")]
    LengthMismatch { got: usize, want: usize },

    #[error("non-positive running time on {0}")]
    NonpositiveSectionTime(String),

    #[error("Newton step left the feasible region and backtracking failed")]
    InfeasibleIterate,

    #[error("no step length keeps the schedule separated")]
    StepInfeasible,

    #[error("negative variance term in {0}; schedule rows are not increasing")]
    NegativeVarianceTerm(String),

    #[error("solver failed for train {train} on segment {segment}: {source}")]
    TrainSegment {
        train: String,
        segment: String,
        #[source]
        source: Box<Error>,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
