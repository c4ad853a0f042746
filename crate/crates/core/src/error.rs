use thiserror::Error;

/// Errors produced while building schemes, evaluating bounds or running sweeps.
#[derive(Debug, Error)]
pub enum Error {
    /// Unsupported or inconsistent parameters.
    #[error("configuration error: {0}")]
    Config(String),

    /// Malformed user input such as a codebook table row.
    #[error("validation error: {0}")]
    Validation(String),

    /// A numerical routine failed (singular matrix, quadrature did not converge, ...).
    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    /// True for errors caused by bad user input rather than a failed computation.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Validation(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
