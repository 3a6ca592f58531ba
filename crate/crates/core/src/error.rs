use thiserror::Error;

/// Errors raised across the library.
///
/// The variants line up with the CLI exit-code contract: domain errors are
/// hypothesis failures, usage errors are malformed requests.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A theorem hypothesis or mathematical domain requirement failed.
    #[error("domain error: {0}")]
    Domain(String),
    /// The request itself is malformed (wrong input kind, bad shapes).
    #[error("usage error: {0}")]
    Usage(String),
    /// An integer outcome lies outside the support of the distribution.
    #[error("support error: k = {k} outside [{lo}, {hi}]")]
    Support { k: i64, lo: u64, hi: u64 },
    /// A numerical procedure failed to converge.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// Population or matrix file could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
