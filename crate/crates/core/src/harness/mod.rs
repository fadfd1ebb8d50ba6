//! Experiment driver: model problems, error norms, refinement studies,
//! `ε`-sweeps, monotonicity audits and their CSV/plot outputs.

mod config;
mod experiments;
mod norms;
mod problems;
mod report;

use thiserror::Error;

pub use config::{ExperimentConfig, MeshFamily, OPTI_LLOYD_ITERS};
pub use experiments::{
    report_label, run_convergence, run_epsilon_sweep, run_monotonicity_audit, run_refinement, solve_level, AuditReport,
    AuditRow, DmpCheck, SolvedLevel, SweepConfig, DMP_TOL,
};
pub use norms::{a_norm, flux_error, fvm_a_norm, inf_norm, observed_order, projection_error, scheme_a_norm};
pub use problems::{exact_gradient_ex1, exact_solution_ex1, sine, sine_gradient, Problem};
pub use report::{
    emit_plots, emit_sweep_plot, ConvergenceReport, ConvergenceRow, LevelOutcome, LevelStats, SweepPoint, SweepReport,
    CSV_HEADER, FAILED,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
