use std::fmt;
use std::io;

use skis::SkisError;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_INCOMPATIBLE: i32 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    /// Failure touching `path`; a missing input is a usage error.
    pub fn io(path: &std::path::Path, err: io::Error) -> Self {
        let code = if err.kind() == io::ErrorKind::NotFound {
            EXIT_USAGE
        } else {
            EXIT_IO
        };
        CliError {
            code,
            message: format!("{}: {err}", path.display()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<SkisError> for CliError {
    fn from(err: SkisError) -> Self {
        let code = match &err {
            SkisError::Incompatible(_) => EXIT_INCOMPATIBLE,
            SkisError::Io(e) if e.kind() == io::ErrorKind::NotFound => EXIT_USAGE,
            SkisError::Io(_) | SkisError::Format(_) => EXIT_IO,
            SkisError::Parse { .. }
            | SkisError::Validation(_)
            | SkisError::NoMass
            | SkisError::NoSamples
            | SkisError::TooLarge { .. } => EXIT_USAGE,
        };
        CliError {
            code,
            message: err.to_string(),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(err: io::Error) -> Self {
        CliError {
            code: EXIT_IO,
            message: err.to_string(),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
