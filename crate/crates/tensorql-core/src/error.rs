//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("dimension product overflows")]
    DimensionOverflow,

    #[error("{what} index {index} out of range for dimension {dim}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        dim: usize,
    },

    #[error("the two fixed axes must differ")]
    DuplicateAxis,

    #[error("line {line}: {msg}")]
    NTriples { line: usize, msg: String },

    #[error("syntax error at line {line}, column {col}: {msg}")]
    QuerySyntax {
        line: usize,
        col: usize,
        msg: String,
    },

    #[error("unsupported feature: {0}")]
    Unsupported(String),

    #[error("unknown graph alias `{0}`")]
    UnknownGraph(String),

    #[error("{0}")]
    Eval(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn shape(msg: impl Into<String>) -> Self {
        Error::ShapeMismatch(msg.into())
    }

    pub fn eval(msg: impl Into<String>) -> Self {
        Error::Eval(msg.into())
    }

    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }
}
