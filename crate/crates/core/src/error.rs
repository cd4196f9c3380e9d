use std::fmt;

/// Errors raised by weight, series, norm and experiment operations.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A quadrature or series evaluation did not reach its tolerance.
    #[error("numeric error: {message} (residual estimate {residual:e})")]
    Numeric { message: String, residual: f64 },

    /// A requested object would not fit the memory budget.
    #[error("resource error: {0}")]
    Resource(String),

    /// A configuration or specification string could not be used.
    #[error("config error at {location}: {message}")]
    Config { location: Location, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

/// Where in a configuration text an error was found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Location {
    pub line: Option<usize>,
    pub field: Option<String>,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.line, &self.field) {
            (Some(l), Some(k)) => write!(f, "line {l}, field `{k}`"),
            (Some(l), None) => write!(f, "line {l}"),
            (None, Some(k)) => write!(f, "field `{k}`"),
            (None, None) => write!(f, "<input>"),
        }
    }
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>, residual: f64) -> Self {
        Error::Numeric {
            message: msg.into(),
            residual,
        }
    }

    pub(crate) fn config(line: Option<usize>, field: Option<&str>, msg: impl Into<String>) -> Self {
        Error::Config {
            location: Location {
                line,
                field: field.map(str::to_owned),
            },
            message: msg.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
