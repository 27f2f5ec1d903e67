use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A numeric parameter lies outside its admissible domain.
    #[error("invalid parameter `{name}`: {message}")]
    InvalidParameter { name: &'static str, message: String },

    /// Two inputs that must agree in size do not.
    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    /// The frequency grid is too coarse for the requested quadrature.
    #[error("grid with {m} points is too coarse: need at least {required}")]
    GridTooCoarse { m: usize, required: usize },

    /// The symmetric eigensolver did not converge.
    #[error("eigensolver failed to converge for n = {n}, w = {w}")]
    NoConvergence { n: usize, w: f64 },

    /// A process model is malformed or non-stationary.
    #[error("invalid process model: {0}")]
    InvalidModel(String),

    /// A computed result violates an identity it must satisfy.
    #[error("invariant violated: {0}")]
    InvariantViolated(String),

    /// A serialized table could not be parsed.
    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, message: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        message: message.into(),
    }
}
