use std::path::PathBuf;

use pinchlink_core::Error as CoreError;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    pub const STATISTICAL_FAILURE: u8 = 1;
    pub const CONFIG_ERROR: u8 = 2;
    pub const PLACEMENT_INFEASIBLE: u8 = 3;
}

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("config error: {0}")]
    Config(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("placement infeasible: {0}")]
    Placement(CoreError),
    #[error("{0}")]
    Core(CoreError),
    #[error("validation failed: {0}")]
    Statistical(String),
}

impl AppError {
    pub fn exit_code(&self) -> u8 {
        match self {
            AppError::Config(_) | AppError::Read { .. } | AppError::Write { .. } => exit::CONFIG_ERROR,
            AppError::Placement(_) => exit::PLACEMENT_INFEASIBLE,
            AppError::Core(CoreError::InvalidConfig(_)) => exit::CONFIG_ERROR,
            AppError::Core(_) | AppError::Statistical(_) => exit::STATISTICAL_FAILURE,
        }
    }
}

impl From<CoreError> for AppError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidConfig(msg) => AppError::Config(msg),
            CoreError::PlacementInfeasible { .. } => AppError::Placement(e),
            other => AppError::Core(other),
        }
    }
}

pub type AppResult<T> = Result<T, AppError>;
