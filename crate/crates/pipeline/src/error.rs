use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

use crate::client::FetchError;
use crate::config::ConfigError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NETWORK: i32 = 3;
pub const EXIT_DATA: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Config,
    Ingest,
    Parse,
    Build,
    Quality,
    Metrics,
    Regress,
    Report,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Config => "config",
            Stage::Ingest => "ingest",
            Stage::Parse => "parse",
            Stage::Build => "build",
            Stage::Quality => "quality",
            Stage::Metrics => "metrics",
            Stage::Regress => "regress",
            Stage::Report => "report",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Failure {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Fetch(#[from] FetchError),
    #[error("{0}")]
    Data(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Debug, Error)]
#[error("{stage} stage failed: {failure}")]
pub struct PipelineError {
    pub stage: Stage,
    pub failure: Failure,
}

impl PipelineError {
    pub fn new(stage: Stage, failure: impl Into<Failure>) -> Self {
        Self {
            stage,
            failure: failure.into(),
        }
    }

    pub fn data(stage: Stage, message: impl fmt::Display) -> Self {
        Self::new(stage, Failure::Data(message.to_string()))
    }

    pub fn io(stage: Stage, path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::new(
            stage,
            Failure::Io {
                path: path.into(),
                source,
            },
        )
    }

    pub fn exit_code(&self) -> i32 {
        match self.failure {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Fetch(_) => EXIT_NETWORK,
            Failure::Data(_) => EXIT_DATA,
            Failure::Io { .. } => EXIT_IO,
        }
    }
}
