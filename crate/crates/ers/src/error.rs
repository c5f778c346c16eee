use thiserror::Error;

/// Errors raised by the library and surfaced by the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ErsError {
    #[error("value {0} lies outside [-1, 1]")]
    OutOfRange(String),
    #[error("level {level} is below the anchor level {anchor}")]
    BelowAnchor { level: i64, anchor: i64 },
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("corrupt encoding: code {code} at level {level} is not below {parent}")]
    NotBelow {
        code: String,
        level: i64,
        parent: String,
    },
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("{0}")]
    Unsupported(String),
    #[error("observation list is empty")]
    EmptyObservations,
    #[error("predicate has no interval form")]
    MissingIntervalForm,
    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, ErsError>;
