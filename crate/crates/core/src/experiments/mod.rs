//! Configuration and orchestration of the numerical experiments.

pub mod config;
pub mod run;

pub use config::{Command, ExperimentConfig, RawConfig};
pub use run::{run, RunSummary};
