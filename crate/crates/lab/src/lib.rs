//! Reproducible experiment harness over the estimators in `unitary-lab-core`.

pub mod config;
pub mod record;
pub mod run;
pub mod selftest;
pub mod summary;

pub use config::{Constants, Experiment, ExperimentConfig};
pub use record::{ExperimentRecord, CSV_HEADER};
pub use run::{run_experiment, run_trial, run_trials, trial_seed};
pub use summary::{heisenberg_slope, summarize, Summary};
