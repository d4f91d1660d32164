use thiserror::Error;

/// Errors raised by state construction, criteria evaluation and scenario runs.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SteeringError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("observable supports overlap on site {0}")]
    OverlappingSupport(usize),

    #[error("no threshold in bracket [{low}, {high}]: verdict is {verdict} at both ends")]
    NoThreshold { low: f64, high: f64, verdict: bool },

    #[error("unphysical state: {0}")]
    Unphysical(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl SteeringError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        SteeringError::InvalidArgument(msg.into())
    }

    /// True for errors caused by caller input rather than by the library.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            SteeringError::InvalidArgument(_)
                | SteeringError::DimensionMismatch { .. }
                | SteeringError::OverlappingSupport(_)
                | SteeringError::Parse(_)
        )
    }
}

pub type Result<T, E = SteeringError> = std::result::Result<T, E>;
