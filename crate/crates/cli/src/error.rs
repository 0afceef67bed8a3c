use std::path::PathBuf;

use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_TOLERANCE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] magic_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("output: {0}")]
    Output(String),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Whether a core error is a failure of the numerics rather than of the
/// request.
pub fn is_solver_failure(err: &magic_core::Error) -> bool {
    use magic_core::Error as E;
    matches!(
        err,
        E::NoConvergence { .. } | E::Bracket(_) | E::NotTranslationEigenstate { .. }
    )
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if is_solver_failure(e) => EXIT_SOLVER,
            _ => EXIT_USAGE,
        }
    }
}
