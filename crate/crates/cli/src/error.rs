use std::fmt::Display;
use std::path::{Path, PathBuf};

use thiserror::Error;

/// Exit status for a successful run.
pub const EXIT_OK: i32 = 0;
/// Exit status when a computation fails on valid input.
pub const EXIT_COMPUTATION: i32 = 1;
/// Exit status for usage errors and unreadable or malformed input.
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{}: {message}", path.display())]
    Input { path: PathBuf, message: String },

    /// Input that parsed but cannot support the request, e.g. too short a history.
    #[error("{0}")]
    Data(String),

    #[error("cannot write {}: {source}", path.display())]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {message}")]
    Computation { context: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Computation { .. } => EXIT_COMPUTATION,
            CliError::Usage(_)
            | CliError::Input { .. }
            | CliError::Data(_)
            | CliError::Output { .. } => EXIT_INPUT,
        }
    }

    pub fn input(path: &Path, message: impl Display) -> Self {
        CliError::Input {
            path: path.to_path_buf(),
            message: message.to_string(),
        }
    }

    pub fn computation(context: impl Into<String>, message: impl Display) -> Self {
        CliError::Computation {
            context: context.into(),
            message: message.to_string(),
        }
    }
}
