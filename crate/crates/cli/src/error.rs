use std::path::{Path, PathBuf};

use cumuldyn::ingest::IngestError;
use thiserror::Error;

/// Exit status for invalid arguments, parameters or input contents.
pub const EXIT_USAGE: u8 = 2;
/// Exit status for unreadable or unwritable files.
pub const EXIT_IO: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] cumuldyn::Error),
    #[error(transparent)]
    Ingest(#[from] IngestError),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn csv(path: &Path, err: csv::Error) -> Self {
        if !err.is_io_error() {
            return CliError::Usage(format!("{}: {err}", path.display()));
        }
        match err.into_kind() {
            csv::ErrorKind::Io(source) => CliError::io(path, source),
            _ => unreachable!("checked to be an I/O error"),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => EXIT_IO,
            CliError::Ingest(IngestError::Io { .. }) => EXIT_IO,
            CliError::Core(cumuldyn::Error::Ingest(IngestError::Io { .. })) => EXIT_IO,
            _ => EXIT_USAGE,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
