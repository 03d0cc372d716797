use std::path::PathBuf;

use crate::spec::SpecError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Spec(#[from] SpecError),

    #[error("{0}")]
    Core(#[from] avwc_core::Error),

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 0 ok, 1 usage or configuration, 2 input or validation, 3 size cap.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::Csv(_) => 1,
            CliError::Spec(_) => 2,
            CliError::Core(avwc_core::Error::CapExceeded { .. }) => 3,
            CliError::Core(_) => 2,
        }
    }
}
