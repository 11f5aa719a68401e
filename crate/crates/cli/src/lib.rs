//! Batch harness for excited random walk experiments.

pub mod config;
pub mod error;
pub mod experiment;
pub mod output;

pub use config::{parse_config, ExperimentConfig, Parsed, Preset, WORKERS_ENV};
pub use error::CliError;
pub use experiment::{run_experiment, ExperimentOutput};
pub use output::write_outputs;
pub use walklab_core::seed_derivation;
