use thiserror::Error;

/// Errors raised by the model builders and the engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("{engine} supports at most {cap} bath modes, got {modes}{hint}")]
    TooManyModes {
        engine: &'static str,
        modes: usize,
        cap: usize,
        hint: &'static str,
    },

    #[error("quadrature did not converge: value {value:e}, error estimate {estimate:e} after {subdivisions} subdivisions")]
    Convergence {
        value: f64,
        estimate: f64,
        subdivisions: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("{engine} only supports the excited initial state |1>")]
    UnsupportedInitialState { engine: &'static str },

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
