use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid braiding: {0}")]
    InvalidBraiding(String),

    #[error("unstable truncation: ideal pieces still changing after slack {slack} (degree {degree})")]
    UnstableTruncation { degree: usize, slack: usize },

    #[error("input exceeds truncation degree {0}")]
    Truncated(usize),

    #[error("refused: {0}")]
    Refused(String),

    #[error("incompatible bracket: {0}")]
    IncompatibleBracket(String),

    #[error("assertion failed: {0}")]
    Assertion(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("tower did not stabilize within {0} stages")]
    StageCap(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
