use std::io;

use thiserror::Error;

/// Errors produced by the sketching, estimation and maximization pipeline.
#[derive(Debug, Error)]
pub enum SkisError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("no sampling mass: every node has zero non-singular probability")]
    NoMass,

    #[error("sketch holds no samples")]
    NoSamples,

    #[error("incompatible sketches: {0}")]
    Incompatible(String),

    #[error("malformed sketch file: {0}")]
    Format(String),

    #[error(
        "instance too large for exhaustive enumeration: {what} = {actual} exceeds limit {limit}"
    )]
    TooLarge {
        what: &'static str,
        actual: f64,
        limit: f64,
    },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl SkisError {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        SkisError::Validation(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, SkisError>;
