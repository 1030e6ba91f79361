//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SyzError {
    /// Syntax error in a field descriptor, polynomial or element expression.
    /// `pos` is a byte offset into the offending input.
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("field error: {0}")]
    Field(String),

    #[error("degree mismatch: {0}")]
    Degree(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("inconsistent linear system")]
    Inconsistent,

    #[error("denominator vanishes at the specialization point")]
    DenominatorVanishes,

    #[error("generators could not be certified zero-free on the curve up to N = {0}")]
    CommonZero(u32),

    #[error("search bound exhausted at N = {0}")]
    BoundExhausted(u32),

    #[error("unknown scenario: {0}")]
    UnknownScenario(String),

    #[error("parameter out of range: {0}")]
    BadParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, SyzError>;
