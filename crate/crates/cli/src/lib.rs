//! Pipeline orchestration behind the `ao` binary: CM scans, counting runs,
//! plot data.

pub mod config;
pub mod count;
pub mod profile;
pub mod scan;

use thiserror::Error;

pub use config::ScanConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] ao_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 3 for configuration errors; other failures abort with 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 3,
            _ => 1,
        }
    }
}
