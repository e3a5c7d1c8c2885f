use thiserror::Error;

/// Errors raised by the library. The variants map onto CLI exit codes.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Malformed or inconsistent input (wrong sizes, unknown points, empty sets).
    #[error("input error: {0}")]
    Input(String),
    /// A point lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// A mathematical precondition of a construction does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// A problem file does not match the expected schema.
    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn precondition<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}
