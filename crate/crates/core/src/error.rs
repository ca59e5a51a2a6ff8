use thiserror::Error;

use crate::model::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(ValidationReport),

    #[error("grid needs at least 8 intervals, got {0}")]
    GridTooCoarse(usize),

    #[error("field length {got} does not match grid ({expected} nodes)")]
    LengthMismatch { expected: usize, got: usize },

    #[error("signal queried at t = {t} outside its table [{start}, {end}]")]
    OutsideTable { t: f64, start: f64, end: f64 },

    #[error("malformed signal: {0}")]
    MalformedSignal(String),

    #[error("state is missing the temperature field required by variant {0}")]
    MissingTemperature(String),

    #[error("singular system at row {row} (pivot ratio {pivot_ratio:.3e})")]
    SingularSystem { row: usize, pivot_ratio: f64 },

    #[error("non-finite value after step {step}; last healthy state index {last_healthy}")]
    NonFinite { step: usize, last_healthy: usize },

    #[error("time step must be positive and finite, got {0}")]
    BadTimeStep(f64),

    #[error("certificate mismatch: {0}")]
    CertificateMismatch(String),

    #[error("r must be positive, got {0}")]
    NonPositiveR(f64),

    #[error("empty or inverted r range [{0}, {1}]")]
    EmptyRange(f64, f64),

    #[error("inconsistent initial data: {0}")]
    InconsistentInit(String),

    #[error("invalid experiment setup: {0}")]
    InvalidSetup(String),

    #[error("too few samples for a decay fit: {0} (need at least 10)")]
    InsufficientSamples(usize),
}
