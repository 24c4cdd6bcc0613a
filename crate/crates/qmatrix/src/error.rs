use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {msg}")]
    Parse { path: PathBuf, msg: String },
    #[error(transparent)]
    Core(#[from] qmatrix_core::Error),
}

impl CliError {
    /// 3 for a failed norm or ledger check, 2 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(qmatrix_core::Error::Inconsistency(_)) => 3,
            _ => 2,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
