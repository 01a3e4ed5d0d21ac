//! Config-driven experiments: single solves, Cartesian sweeps, `T1` sweeps with zero-noise
//! extrapolation, and the self-validation suite.
//!
//! Every run draws its randomness from `derive_seed(base_seed, [cell, rep])`, so results do
//! not depend on how work is spread over threads.

mod config;
mod run;
mod validate;
mod zne;

pub use config::{parse_family, Cell, ExperimentConfig, NoiseConfig, ZneConfig};
pub use run::{
    cmd_solve, cmd_sweep, execute, write_outputs, write_runs_csv, BestRun, CellSummary, Optimum, RunRecord,
    Summary, RUNS_HEADER,
};
pub use validate::{run_validation, Check, Fault, ValidationReport, TABLE_ROWS};
pub use zne::{cmd_noise, zne_sweep, T1Point, ZneReport, ZneSweep};
