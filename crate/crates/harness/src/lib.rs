//! Experiment driver for the subdiffusion potential reconstruction library:
//! synthetic data generation, noise injection, reconstruction runs,
//! convergence sweeps and the `subdiff` command-line interface.

pub mod cli;
pub mod config;
pub mod coupling;
pub mod data;
pub mod error;
pub mod manifest;
pub mod potentials;
pub mod problem;
pub mod run;
pub mod sweep;

pub use config::{ExperimentConfig, ProblemKind, RawConfig, SweepKind};
pub use coupling::{couple_parameters, Coupling};
pub use data::{generate_data, FineTrace};
pub use error::{HarnessError, Result};
pub use potentials::{builtin_potential, Potential};
pub use run::{run_reconstruction, RunOutcome};
pub use sweep::{run_sweep, SweepOutput, SweepResult, SweepRow};
