use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Io { .. } => 4,
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

/// Attaches the config field a library error came from.
pub(crate) fn at(field: &str) -> impl Fn(degroot_core::Error) -> CliError + '_ {
    move |e| {
        use degroot_core::Error as E;
        match e {
            E::NoUniqueStationary | E::Solver(_) | E::Inconsistent => {
                CliError::Solver(format!("{field}: {e}"))
            }
            _ => CliError::Config(format!("{field}: {e}")),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
