use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A syntax or validation error in an input document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// 1-based line, when the failure has a source position.
    pub line: Option<usize>,
    /// 1-based column (in characters).
    pub column: Option<usize>,
    pub message: String,
}

impl ParseError {
    pub fn at(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line: Some(line),
            column: Some(column),
            message: message.into(),
        }
    }

    pub fn unlocated(message: impl Into<String>) -> Self {
        ParseError {
            line: None,
            column: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(line), Some(col)) => write!(f, "{line}:{col}: {}", self.message),
            (Some(line), None) => write!(f, "{line}: {}", self.message),
            _ => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("element index {index} out of range for carrier of size {size}")]
    ElementOutOfRange { index: usize, size: usize },
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("element `{0}` has no type")]
    MissingType(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("operation budget of {budget} exhausted before the clone closed")]
    ResourceExhausted { budget: usize },
    /// A state the underlying theory rules out. Always a bug.
    #[error("internal inconsistency: {0}")]
    Internal(String),
}
