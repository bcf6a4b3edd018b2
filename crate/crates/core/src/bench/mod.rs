//! Experiment orchestration and LP-file export.

mod config;
mod experiment;
mod lpfile;

pub use config::{ExperimentConfig, SolveChoice};
pub use experiment::{
    run_bound_experiment, run_solver_experiment, BoundExperiment, BoundRow, FrequencyCount,
    FrequencyTable, SolveRow, SolverExperiment, TimingSummary, CSV_SCHEMA, TIE_TOL,
};
pub use lpfile::{export_lp_file, lp_file_string};
