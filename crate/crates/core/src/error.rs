use thiserror::Error;

/// Failure classes shared by every module. Each variant maps to one process
/// exit code in the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("numeric error: {message}")]
    Numeric { message: String, diagnostics: Vec<(String, f64)> },

    #[error("statistics error: {0}")]
    Statistics(String),

    #[error("config syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("config validation error at `{path}`: {message}")]
    Validation { path: String, message: String },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric { message: msg.into(), diagnostics: Vec::new() }
    }

    pub(crate) fn numeric_with(msg: impl Into<String>, diagnostics: Vec<(&str, f64)>) -> Self {
        Error::Numeric {
            message: msg.into(),
            diagnostics: diagnostics.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        }
    }

    pub(crate) fn statistics(msg: impl Into<String>) -> Self {
        Error::Statistics(msg.into())
    }

    pub(crate) fn validation(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Validation { path: path.into(), message: msg.into() }
    }

    /// Process exit code: 1 I/O, 2 syntax, 3 validation, 4 numeric, 5 statistics.
    /// Domain errors surface as validation failures of the inputs.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 1,
            Error::Syntax { .. } => 2,
            Error::Validation { .. } | Error::Domain(_) => 3,
            Error::Numeric { .. } => 4,
            Error::Statistics(_) => 5,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
