use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet mismatch: expected size {expected}, got {got}")]
    AlphabetMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("enumeration budget exceeded: {needed} > {limit} (override with {var})", var = crate::BUDGET_ENV)]
    Budget { needed: u64, limit: u64 },

    #[error("degenerate history {0}: mixture assigns it zero probability")]
    DegenerateHistory(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
