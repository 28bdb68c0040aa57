use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("non-finite value {value} at index {index}")]
    Numeric { index: usize, value: f64 },

    #[error("solver error: {0}")]
    Solver(String),

    #[error("input error: {0}")]
    Input(String),

    #[error("resource exhausted: {0}")]
    Resource(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Short machine-readable tag, used in the CLI's error line.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Config(_) => "config",
            Error::Numeric { .. } => "numeric",
            Error::Solver(_) => "solver",
            Error::Input(_) => "input",
            Error::Resource(_) => "resource",
            Error::Parameter(_) => "parameter",
            Error::Io(_) => "io",
        }
    }

    /// Prefixes the message with `context`, keeping the kind.
    pub fn context(self, context: impl std::fmt::Display) -> Self {
        match self {
            Error::Domain(m) => Error::Domain(format!("{context}: {m}")),
            Error::Config(m) => Error::Config(format!("{context}: {m}")),
            Error::Solver(m) => Error::Solver(format!("{context}: {m}")),
            Error::Input(m) => Error::Input(format!("{context}: {m}")),
            Error::Resource(m) => Error::Resource(format!("{context}: {m}")),
            Error::Parameter(m) => Error::Parameter(format!("{context}: {m}")),
            Error::Io(m) => Error::Io(format!("{context}: {m}")),
            numeric @ Error::Numeric { .. } => numeric,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
