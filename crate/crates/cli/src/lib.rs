//! Config-driven front end for the `holonomy` library.

pub mod commands;
pub mod config;
pub mod report;
pub mod svg;

use std::path::PathBuf;

pub use commands::run;
pub use config::{Command, Format, JobConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] holonomy::Error),
    #[error("every curvature grid point is masked")]
    AllMasked,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 0 success, 2 config, 3 EP proximity, 4 precision, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(holonomy::Error::NearEP { .. }) | CliError::AllMasked => 3,
            CliError::Core(holonomy::Error::PrecisionLoss { .. }) => 4,
            _ => 1,
        }
    }
}

/// Resolved command-line options.
#[derive(Debug, Clone)]
pub struct Options {
    pub command: Command,
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub samples: Option<usize>,
    pub format: Option<Format>,
    pub plot: bool,
}
