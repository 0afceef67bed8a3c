//! Experiment drivers behind the `magic` command: configuration, the
//! experiment registry and table output.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

pub use config::ExperimentConfig;
pub use error::{CliError, CliResult};
pub use experiments::{
    experiment_by_name, experiment_names, run, write_report, Experiment, Report,
};
pub use output::{Format, Table, Value};
