use thiserror::Error;

/// Errors raised by the numerical engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid Jacobi weight exponents alpha={alpha}, beta={beta} (both must exceed -1)")]
    InvalidWeight { alpha: f64, beta: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("accuracy not reached for {what}: achieved {achieved:e}")]
    Accuracy { what: String, achieved: f64 },

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::InvalidWeight { .. } => "invalid_weight",
            Error::Domain(_) => "domain",
            Error::Accuracy { .. } => "accuracy",
            Error::Resolution(_) => "resolution",
            Error::Parse(_) => "parse",
        }
    }

    /// True for failures caused by numerical accuracy rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Accuracy { .. } | Error::Resolution(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
