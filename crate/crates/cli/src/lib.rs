//! Experiment runner on top of `spinmz-core`.

pub mod config;
pub mod experiments;

pub use config::{parse_config, ConfigOverrides, ExperimentConfig, ExperimentId, Format, GridSpec};
pub use experiments::{run_experiment, unwrap_phases, RunManifest};

use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Model(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    /// 2 for bad input, 3 for numeric failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Model(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    pub fn to_json(&self) -> String {
        json!({ "error": self.to_string(), "code": self.exit_code() }).to_string()
    }
}

impl From<spinmz_core::Error> for CliError {
    fn from(e: spinmz_core::Error) -> Self {
        if e.is_numeric() {
            CliError::Numeric(e.to_string())
        } else {
            CliError::Model(e.to_string())
        }
    }
}
