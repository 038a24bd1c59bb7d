use thiserror::Error;

/// Errors raised by net construction, parsing and t-value computations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A caller broke an operation precondition (bad index, wrong shape, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A generator matrix is singular, so the net is not fully projection-regular.
    /// Coordinates are 1-based.
    #[error("invalid net: generator matrix {coordinate} is singular")]
    SingularMatrix { coordinate: usize },

    /// A leading m x m minor of a generator matrix is singular.
    #[error("invalid embedded net: leading {m}x{m} minor of generator matrix {coordinate} is singular")]
    SingularMinor { coordinate: usize, m: usize },

    #[error("unsupported base {0}: only base 2 is implemented")]
    UnsupportedBase(u64),

    /// A dimension exceeds what the implementation supports.
    #[error("size limit: {0}")]
    Size(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}
