//! Sparse storage, the nonsymmetric solver and structural matrix checks.

mod checks;
mod solver;
mod sparse;

pub use checks::{asymmetry, default_tolerance, m_matrix_check, symmetry_check, MMatrixReport, DEFAULT_RELATIVE_TOL};
pub use solver::{relative_residual, solve_sparse, Ilu0, SolveMethod, Solution, SolverError, SolverOptions};
pub use sparse::{CsrMatrix, TripletBuilder};
