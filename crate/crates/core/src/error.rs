use thiserror::Error;

/// Errors raised by the summation engine and its building blocks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PsfError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A pair was asked for pointwise evaluation outside its absolutely
    /// convergent range.
    #[error("mode error: {0}")]
    Mode(String),

    #[error("kernel singularity at {0}")]
    KernelSingularity(String),

    #[error("non-convergent configuration: {0}")]
    NonConvergent(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("root bracket failure: {0}")]
    Bracket(String),
}

pub type Result<T> = std::result::Result<T, PsfError>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(PsfError::DimensionMismatch { expected, got })
    }
}
