//! Experiment harness and command-line front end for `schedlab-core`.
//!
//! Every experiment is a pure function of its [`config::ExperimentConfig`]:
//! replication `r` of cell `k` draws from its own ChaCha stream derived from
//! `(seed, experiment, cell, r)`, results are merged in index order, and the
//! rendered CSV is byte-identical for any thread count.

pub mod cli;
pub mod config;
pub mod experiments;
pub mod output;

pub use config::{load_config, parse_config, ConfigError, ExperimentConfig, ModelSpec};
pub use output::ExperimentResult;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] schedlab_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl Error {
    /// Process exit code: 2 for anything the user must fix in the input,
    /// 1 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Usage(_) => 2,
            Self::Core(_) | Self::Io { .. } => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
