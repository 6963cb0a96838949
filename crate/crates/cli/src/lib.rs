//! Experiment runners behind the `matderiv` command-line tool.

pub mod config;
pub mod custom;
pub mod error;
pub mod experiments;
pub mod records;
pub mod sampling;

pub use config::{Experiment, ExperimentConfig, HGrid};
pub use error::{CliError, CliResult};
pub use records::{sort_records, write_csv, ConvergenceRecord, CSV_HEADER};
