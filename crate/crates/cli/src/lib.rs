//! Configuration-driven runner for the dwlab experiments.

pub mod config;
pub mod manifest;
pub mod run;

pub use config::{load_config, parse_config, Experiment, Overrides, RunConfig, Violations};
pub use manifest::RunManifest;
pub use run::{run_experiment, RunError, RunOutcome};
