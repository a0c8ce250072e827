use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A value could not be constructed (e.g. an unsupported Bessel order).
    #[error("construction error: {0}")]
    Construction(String),

    /// A numerical procedure could not reach its accuracy target.
    #[error("accuracy error: {what} (achieved error estimate {estimate:.3e})")]
    Accuracy { what: String, estimate: f64 },

    /// A root bracket did not straddle a sign change.
    #[error("bracket [{lo}, {hi}] does not straddle a sign change ({context})")]
    Bracket { lo: f64, hi: f64, context: String },

    /// Requested operation is not available for this configuration.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A linear-algebra routine failed.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Bad configuration or command-line usage.
    #[error("usage: {0}")]
    Usage(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn accuracy(what: impl Into<String>, estimate: f64) -> Self {
        Error::Accuracy {
            what: what.into(),
            estimate,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
