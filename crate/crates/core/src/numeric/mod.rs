//! Finite-difference eigensolver for the stationary Sturm–Liouville problems.
//!
//! Each problem `-phi'' + V phi = lambda phi` is discretized with the 3-point
//! Laplacian on a uniform grid with Dirichlet zeros one spacing outside the
//! first and last node. The resulting symmetric tridiagonal matrix is solved
//! by Sturm-sequence bisection, eigenvectors come from inverse iteration, and
//! the `O(h^2)` error is removed by Richardson extrapolation on nested grids.

mod commutator;
mod grid;
mod problem;
mod solve;
mod tridiag;

pub use commutator::{commutator_residual, BracketConvention, CommutatorResidual, GridOperator};
pub use grid::Grid;
pub use problem::{Potential, ProblemKind, ProblemSpec};
pub use solve::{
    convergence_ratios, count_sign_changes, solve, solve_on_grid, ConvergenceReport, EigenResult,
    Level, ResolutionPolicy,
};
pub use tridiag::{assemble, assemble_with, TridiagonalMatrix};
