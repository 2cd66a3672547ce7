//! Operational surface of the leak sensor: file formats, configuration,
//! and the subcommand implementations behind the `leakscale` binary.
//!
//! The numerical work lives in the `leakscale` library crate; this one adds
//! everything that touches the filesystem or a terminal. Commands are plain
//! functions (see [`commands`]) so they can be exercised in-process.

pub mod commands;
pub mod config;
pub mod error;
pub mod ingest;
pub mod report;

pub use commands::{
    cmd_diagnose, cmd_fit, cmd_simulate, cmd_ttest, DiagnoseArgs, DiagnoseOutcome, FitArgs,
    SimulateArgs, TtestArgs,
};
pub use config::{FileConfig, SimSettings, TemperatureUnit};
pub use error::CliError;
