//! Scenario files, trace CSV, run orchestration, sweeps, and the
//! verification suite for the extremum seeking library.

pub mod acceptance;
pub mod config_file;
pub mod metadata;
pub mod runner;
pub mod trace_csv;

pub use config_file::{from_scenario, RawConfig};
pub use runner::{run_to_dir, sweep, RunArtifacts, EXIT_DIVERGED, EXIT_OK, EXIT_VALIDATION};
