//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty frame")]
    EmptyFrame,

    #[error("gap undefined: {0}")]
    GapUndefined(String),

    #[error("series not comparable: {0}")]
    SeriesNotComparable(String),

    #[error("simplices not enumerated: dimension {requested} exceeds cap {dim_cap}")]
    SimplicesNotEnumerated { requested: usize, dim_cap: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid event: {0}")]
    InvalidEvent(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
