use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("ambient mismatch: {0}")]
    AmbientMismatch(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("element is not invertible in the requested mode")]
    NotInvertible,

    #[error("not a projection")]
    NotAProjection,

    #[error("not an idempotent")]
    NotIdempotent,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("gadget {0} failed its own certification")]
    CertificationFailed(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("outside the domain: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
