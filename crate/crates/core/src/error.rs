use thiserror::Error;

/// Errors produced by the core library.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A factorization hit a non-positive pivot: the matrix is singular or
    /// not positive definite.
    #[error("matrix not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    /// An internal invariant was violated (e.g. a rank-one update on a state
    /// that is no longer positive definite).
    #[error("corrupted internal state: {0}")]
    CorruptState(String),

    #[error("source stream exhausted after {consumed} samples ({requested} requested)")]
    StreamTruncated { consumed: usize, requested: usize },

    #[error("non-finite value in source stream at index {index}")]
    NonFiniteStream { index: usize },
}

pub type Result<T> = std::result::Result<T, CoreError>;
