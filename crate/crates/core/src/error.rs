//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("parse error: {0}")]
    Parse(String),

    /// MNIS presampling exhausted its budget without observing a failure.
    #[error("no failing point found in {n_presampled} presamples")]
    ShiftNotFound { n_presampled: u64 },

    /// HSCS sphere exploration found no failure region.
    #[error("no failure region found on spheres up to radius {max_radius}")]
    RegionNotFound { max_radius: f64 },

    #[error("run unresolved: {0}")]
    Unresolved(String),

    #[error("simulator unavailable: {0}")]
    SimulatorUnavailable(String),

    #[error("simulator error: {reason} (log: {log_path})")]
    SimulatorRun { reason: String, log_path: String },

    #[error("simulation timed out after {seconds}s (log: {log_path})")]
    SimulatorTimeout { seconds: f64, log_path: String },

    #[error("measurement `{name}` missing from simulator output (log: {log_path})")]
    MissingMeasurement { name: String, log_path: String },

    /// Evaluator failure annotated with the design point that triggered it.
    #[error("evaluation of design {point} failed: {source}")]
    DesignEvaluation {
        point: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
