use thiserror::Error;

pub type Result<T, E = SieveError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SieveError {
    #[error("quadrature did not converge for {integral}")]
    Quadrature { integral: String },

    #[error("LIL-ineligible law {law}: sigma^2 = 0")]
    Ineligible { law: String },

    #[error("horizon exceeded: x = {x} lies beyond the materialized horizon {horizon}")]
    HorizonExceeded { x: f64, horizon: f64 },

    #[error("operation needs a sieve-mode path")]
    NotSieve,

    #[error("walk did not pass the horizon within {cap} steps")]
    StepCap { cap: u64 },

    #[error("invalid law spec {spec:?}: {reason}")]
    LawSpec { spec: String, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty checkpoint range")]
    EmptyRange,
}

pub(crate) fn invalid(msg: impl Into<String>) -> SieveError {
    SieveError::InvalidArgument(msg.into())
}
