use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left_users}x{left_features} vs {right_users}x{right_features}")]
    DimensionMismatch {
        left_users: usize,
        left_features: usize,
        right_users: usize,
        right_features: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot anonymize {n} users with k = {k}")]
    NotEnoughUsers { n: usize, k: usize },

    #[error("instance too large for exhaustive search: {size} > {limit}")]
    InstanceTooLarge { size: usize, limit: usize },

    #[error("bound not applicable: {0}")]
    BoundNotApplicable(String),

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("malformed input at line {line}: {reason}")]
    MalformedInput { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
