use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_UNREACHABLE: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const EXIT_INSUFFICIENT_DATA: i32 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    /// Input that parsed but violates a schema or domain rule. `pointer` is a
    /// JSON pointer (or CSV location) into the offending file.
    #[error("{}: {pointer}: {message}", file.display())]
    Schema { file: PathBuf, pointer: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Unreachable(String),
    #[error("{0}")]
    InsufficientData(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema { .. } | CliError::Usage(_) => EXIT_INPUT,
            CliError::Io { .. } => EXIT_IO,
            CliError::Unreachable(_) => EXIT_UNREACHABLE,
            CliError::InsufficientData(_) => EXIT_INSUFFICIENT_DATA,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }

    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn schema(file: &Path, pointer: impl Into<String>, message: impl ToString) -> Self {
        CliError::Schema { file: file.to_path_buf(), pointer: pointer.into(), message: message.to_string() }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
