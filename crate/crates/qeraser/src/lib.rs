//! Command-line front end for `qeraser-core`: config files, scenario runs,
//! sweeps and their CSV/JSON outputs.

pub mod config;
pub mod output;

use std::path::PathBuf;

pub use config::{parse_config, ParsedConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Line {
        line: usize,
        source: qeraser_core::Error,
    },
    #[error("unknown scenario `{0}` (see `qeraser list`)")]
    UnknownScenario(String),
    #[error("--set {0}: expected key=value")]
    BadSet(String),
    #[error("--values: `{0}` is not a number")]
    BadSweepValue(String),
    #[error(transparent)]
    Model(#[from] qeraser_core::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    /// 0 success, 1 configuration error, 2 numerical guard failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Model(e) if e.is_numerical() => 2,
            CliError::Line { source, .. } if source.is_numerical() => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
