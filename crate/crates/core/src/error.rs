use thiserror::Error;

/// Contract and numerical failures raised by the problem-level operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GviError {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: String,
        expected: usize,
        found: usize,
    },
    /// A parameter violated an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),
    /// A non-finite value appeared; `stage` names where.
    #[error("numerical overflow: non-finite value produced by {stage}")]
    NonFinite { stage: String },
    #[error("invalid construction: {0}")]
    Construction(String),
    /// A solver precondition on declared constants does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),
}

impl GviError {
    pub(crate) fn dims(context: impl Into<String>, expected: usize, found: usize) -> Self {
        GviError::DimensionMismatch {
            context: context.into(),
            expected,
            found,
        }
    }

    pub(crate) fn non_finite(stage: impl Into<String>) -> Self {
        GviError::NonFinite {
            stage: stage.into(),
        }
    }
}

pub type Result<T, E = GviError> = std::result::Result<T, E>;
