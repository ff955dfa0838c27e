//! Command-line orchestration for the blow-up laboratory: configuration files, snapshot
//! persistence and the scenario pipelines behind the `bulb` binary.

pub mod config;
mod error;
pub mod output;
pub mod scenarios;
pub mod snapshot_io;

pub use config::{parse_config, parse_config_with, OutputFormat, RunConfig, Scenario};
pub use error::{CliError, Origin, Result};
pub use scenarios::{execute, run_scenario, Check, Outcome, Report};
pub use snapshot_io::{read_snapshot, read_snapshot_file, write_snapshot, FrameKind, SnapshotFile};
