use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: search space must hold at least one address")]
    InvalidDimension,

    #[error(
        "dimension mismatch: state has {state} amplitudes, predicate covers {predicate} addresses"
    )]
    DimensionMismatch { state: usize, predicate: usize },

    #[error("state is not normalized: total probability {norm}")]
    NotNormalized { norm: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Brute-force enumeration would exceed the configured vertex budget.
    #[error("instance too large for exhaustive enumeration: {estimate} vertices (limit {limit})")]
    Infeasible { estimate: f64, limit: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
