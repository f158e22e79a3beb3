use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("point {0:?} is not inside the open unit ball")]
    OutsideBall(Vec<f64>),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid map descriptor: {0}")]
    InvalidDescriptor(String),

    #[error("invalid jet: {0}")]
    InvalidJet(String),

    #[error("multi-index of total degree {degree} is outside 1..={max}")]
    IndexOutOfRange { degree: usize, max: usize },

    #[error("invalid Herglotz field: {0}")]
    InvalidField(String),

    #[error("invalid time arguments: {0}")]
    InvalidTimes(String),

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("scaled limit did not stabilize before horizon {horizon} (last change {last_change:e})")]
    HorizonCap { horizon: f64, last_change: f64 },

    #[error("singular Jacobian (condition estimate {condition:e})")]
    SingularJacobian { condition: f64 },

    #[error("invalid needle: {0}")]
    InvalidNeedle(String),

    #[error("invalid functional: {0}")]
    InvalidFunctional(String),

    #[error("missing evaluation data: {0}")]
    MissingData(String),

    #[error("empty grid or family: {0}")]
    EmptyGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("internal error: {0}")]
    Internal(String),
}
