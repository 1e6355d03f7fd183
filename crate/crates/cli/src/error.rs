use std::path::{Path, PathBuf};

use thiserror::Error;

/// Failure of a command, classified by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}, line {line}: {message}")]
    Parse { path: PathBuf, line: u64, message: String },
    #[error("{0}")]
    Input(String),
    #[error("{context}{source}")]
    Core {
        context: String,
        #[source]
        source: ftspec::Error,
    },
}

impl CliError {
    /// 1 for unusable input, 2 for numerical or degenerate failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core { source, .. } => match source.root() {
                ftspec::Error::Degenerate(_) | ftspec::Error::Numeric(_) | ftspec::Error::Graph(_) => 2,
                _ => 1,
            },
            _ => 1,
        }
    }

    pub fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
        move |source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn parse(path: &Path, line: u64, message: impl Into<String>) -> CliError {
        CliError::Parse {
            path: path.to_path_buf(),
            line,
            message: message.into(),
        }
    }

    pub fn input(message: impl Into<String>) -> CliError {
        CliError::Input(message.into())
    }
}

impl From<ftspec::Error> for CliError {
    fn from(source: ftspec::Error) -> Self {
        CliError::Core {
            context: String::new(),
            source,
        }
    }
}

pub trait Context<T> {
    /// Prefixes a core error with what was being processed (usually a file name).
    fn context(self, what: impl std::fmt::Display) -> Result<T, CliError>;
}

impl<T> Context<T> for Result<T, ftspec::Error> {
    fn context(self, what: impl std::fmt::Display) -> Result<T, CliError> {
        self.map_err(|source| CliError::Core {
            context: format!("{what}: "),
            source,
        })
    }
}

pub type CliResult<T> = Result<T, CliError>;
