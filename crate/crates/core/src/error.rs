use thiserror::Error;

/// Errors raised across the design, decoding and simulation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// A text document could not be parsed. `line` is 1-based.
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    /// Numerical degeneracy (e.g. a pmf with fewer non-empty cells than requested levels).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// The schedule and the code or channel word do not fit together.
    #[error("precision mismatch: {0}")]
    Mismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}
