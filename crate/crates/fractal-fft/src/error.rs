use thiserror::Error;

/// Errors produced by the library and the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    /// An index fell outside its documented range.
    #[error("index out of range: {0}")]
    OutOfRange(String),

    /// A vector or matrix had the wrong dimensions.
    #[error("shape mismatch: expected length {expected}, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },

    /// Input data violated a structural invariant.
    #[error("validation failed: {0}")]
    Validation(String),

    /// A configured size cap was exceeded.
    #[error("resource cap exceeded: {0}")]
    Resource(String),

    /// A matrix was singular or an inverse failed its residual check.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A verification run found deviations above tolerance.
    #[error("verification failed: {0}")]
    Verification(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("config parse error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI: 1 validation, 2 verification, 3 resource cap.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::OutOfRange(_)
            | Error::ShapeMismatch { .. }
            | Error::Validation(_)
            | Error::Io(_)
            | Error::Json(_) => 1,
            Error::Numerical(_) | Error::Verification(_) => 2,
            Error::Resource(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
