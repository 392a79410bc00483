//! Batch front end: simulations, reference tables and parameter sweeps.

pub mod commands;
pub mod config;

use std::path::PathBuf;

use thiserror::Error;

pub use config::{ConfigError, ExperimentConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error in {0}")]
    Config(#[from] ConfigError),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub const CONFIG_EXIT: i32 = 2;
    pub const NUMERICAL_EXIT: i32 = 3;

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => Self::NUMERICAL_EXIT,
            _ => Self::CONFIG_EXIT,
        }
    }
}
