use std::path::PathBuf;

use thiserror::Error;

#[derive(Error, Debug)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Invalid(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 3,
            _ => 2,
        }
    }
}

impl From<terrain_guard::TerrainError> for CliError {
    fn from(e: terrain_guard::TerrainError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<terrain_guard::GenError> for CliError {
    fn from(e: terrain_guard::GenError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<terrain_guard::BatcError> for CliError {
    fn from(e: terrain_guard::BatcError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<terrain_guard::AtcError> for CliError {
    fn from(e: terrain_guard::AtcError) -> Self {
        CliError::Invalid(e.to_string())
    }
}
