use std::fmt;
use std::process::ExitCode;

use cbop_core::Error;

/// Everything that ends a run early, with its exit code.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable, malformed or invalid configuration.
    Config(String),
    Core(Error),
    Io(String),
    /// A verification contract was exceeded.
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Core(e) => match e {
                Error::Degeneracy { .. } => 3,
                Error::Precision { .. } | Error::Quadrature(_) => 4,
                Error::Integration { .. } => 5,
                Error::Domain(_) | Error::Mode(_) | Error::Shape(_) | Error::Range { .. } | Error::Format(_) => 2,
            },
            CliError::Failed(_) => 5,
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(s) => write!(f, "configuration error: {s}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(s) => write!(f, "i/o error: {s}"),
            CliError::Failed(s) => write!(f, "verification failed: {s}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
