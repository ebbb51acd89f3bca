use std::path::PathBuf;

use wavessm_core::Error as CoreError;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("checksum mismatch: manifest says {expected}, payload hashes to {found}")]
    ChecksumMismatch { expected: String, found: String },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("malformed CSV {}: {message}", path.display())]
    Csv { path: PathBuf, message: String },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// Process exit status: 3 for numeric divergence, 1 for I/O and
    /// internal failures, 2 for everything the caller can fix.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(CoreError::Overflow { .. } | CoreError::NoConvergence { .. }) => 3,
            CliError::Core(CoreError::BoundViolated { .. } | CoreError::FilterInvalid(_)) => 1,
            CliError::Io { .. } => 1,
            _ => 2,
        }
    }
}
