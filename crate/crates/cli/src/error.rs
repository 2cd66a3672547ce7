//! Error type for ingestion, configuration, and command execution.

use std::path::PathBuf;

use leakscale::fit::FitError;
use leakscale::sensor::SensorError;
use leakscale::sim::SimError;
use leakscale::telemetry::TelemetryError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: expected header `{expected}`, found `{found}`", path.display())]
    Schema {
        path: PathBuf,
        expected: String,
        found: String,
    },

    #[error("{} line {line}: {message}", path.display())]
    Malformed {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{} line {line}: timestamps not sorted ascending", path.display())]
    Unsorted { path: PathBuf, line: u64 },

    #[error("configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Telemetry(#[from] TelemetryError),

    #[error(transparent)]
    Sim(#[from] SimError),

    #[error(transparent)]
    Fit(#[from] FitError),

    #[error(transparent)]
    Sensor(#[from] SensorError),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn malformed(path: impl Into<PathBuf>, line: u64, message: impl Into<String>) -> Self {
        CliError::Malformed {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
