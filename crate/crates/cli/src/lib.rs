//! Command-line driver for FTN capacity and IAPR sweeps.

pub mod config;
pub mod csv_out;
pub mod run;

pub use config::{parse_config, CommandKind, ConfigError, ExperimentConfig};
pub use run::{run, run_and_write, RunError};
