use std::fmt;

/// Error categories used across the toolkit.
///
/// The CLI maps these onto process exit codes: configuration and contract
/// violations exit 2, numerical failures exit 3, file problems exit 4.
#[derive(Debug)]
pub enum Error {
    /// Tensor or field extents do not line up.
    Dimension(String),
    /// Invalid configuration value or combination.
    Config(String),
    /// NaN / infinity / instability encountered during computation.
    Numeric(String),
    /// An API precondition was violated.
    Contract(String),
    /// Trajectory time axes cannot be aligned by integer thinning.
    Alignment(String),
    /// File read/write/parsing failure.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension(m) => write!(f, "dimension error: {m}"),
            Error::Config(m) => write!(f, "configuration error: {m}"),
            Error::Numeric(m) => write!(f, "numeric error: {m}"),
            Error::Contract(m) => write!(f, "contract error: {m}"),
            Error::Alignment(m) => write!(f, "alignment error: {m}"),
            Error::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
