use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid ensemble spec: {0}")]
    InvalidSpec(String),

    /// Requested a scatterer quantity on the square billiard (R = 0).
    #[error("no scatterer: R = 0")]
    NoScatterer,

    #[error("event budget of {budget} events exceeded at t = {time}")]
    EventBudgetExceeded { budget: u64, time: f64 },

    #[error("rejection sampling failed after {0} attempts (inconsistent geometry?)")]
    RejectionFailure(u64),

    #[error("no scaling regime: fitted log-log slope {slope} is not positive")]
    NoScalingRegime { slope: f64 },

    #[error("insufficient tail: {populated} populated tail bins, need at least {needed}")]
    InsufficientTail { populated: usize, needed: usize },

    #[error("degenerate variance: all samples equal")]
    DegenerateVariance,

    #[error("not enough samples: have {have}, need at least {need}")]
    NotEnoughSamples { have: usize, need: usize },

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
