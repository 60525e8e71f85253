use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("capability exceeded: {0}")]
    Capability(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("matrix is not Hermitian: max |rho - rho^dag| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("trace must be 1, found {trace}")]
    Trace { trace: f64 },

    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for errors raised by density-matrix invariant checks.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::NotHermitian { .. } | Error::Trace { .. } | Error::NotPositive { .. }
        )
    }
}
