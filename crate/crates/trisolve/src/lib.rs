//! Solver for the Dirichlet boundary value problem of the nonlinear
//! triharmonic equation
//!
//! ```text
//! lap^3 u = f(x, u, lap u, lap^2 u)   in (0, l1) x (0, l2),
//! u = g1,  du/dnu = g2,  lap u = g3   on the boundary,
//! ```
//!
//! by a fixed-point iteration whose every sweep solves three Poisson
//! problems with a fourth-order compact scheme and relaxes the unknown
//! boundary trace of `lap^2 u` toward the prescribed normal derivative.
//! The inner solves are direct, via sine-transform diagonalization of the
//! nine-point operator.
//!
//! The library ships the four built-in benchmark problems used by the
//! `trisolve` command line tool, and a convergence-study harness that
//! reports observed orders on doubling grids.

mod error;
pub mod fast_poisson;
pub mod grid;
pub mod problems;
pub mod stencils;
pub mod study;
pub mod triharmonic;

pub use error::{Error, Result};
pub use fast_poisson::{poisson_step, solve_compact_poisson, CompactPoissonSolver, CompactPoissonSystem};
pub use grid::{BoundaryFunction, Edge, Grid, GridFunction};
pub use stencils::{compact_laplacian, compact_rhs, normal_derivative, InteriorField};
pub use study::{
    compute_order_exact, compute_order_successive, parse_grid_list, parse_study_csv,
    run_convergence_study, validate_grid_list, write_solution_csv, write_study_csv, StudyOutcome,
    StudyRow,
};
pub use triharmonic::{
    initialize, iterate_once, solve, IterationReport, IterationState, ProblemSpec, Solution,
    SolverConfig, StopRule, Termination,
};
