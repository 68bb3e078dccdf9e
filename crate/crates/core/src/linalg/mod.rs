//! Sparse storage and the direct solver for the coupled block system.

mod solver;
mod sparse;

pub use solver::{solve, DirectSolver, Method, SolveError, SolveReport, DEFAULT_TOLERANCE};
pub use sparse::{norm2, LinalgError, SparseMatrix, Triplet};
