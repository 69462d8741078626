use thiserror::Error;

/// Errors raised by the herdability toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HerdError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The nonzero rows of `B` are linearly dependent, so no input
    /// transformation brings `B` to selection form.
    #[error("input matrix is not normalizable: {0}")]
    NotNormalizable(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A result failed its own exact re-verification. Always a bug.
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, HerdError>;
