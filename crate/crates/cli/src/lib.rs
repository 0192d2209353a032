//! Configuration, orchestration and reporting for `nlbm-core` experiments.

pub mod config;
pub mod error;
pub mod report;
pub mod run;
pub mod suites;

pub use config::{Experiment, ExperimentConfig, ExperimentKind};
pub use error::{CliError, CliResult};
pub use report::{Check, Fingerprint, RunReport};
pub use run::{execute, run};
pub use suites::Suite;
