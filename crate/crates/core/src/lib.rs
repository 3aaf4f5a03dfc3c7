//! Sparse inverse covariance estimation by proximal gradient descent.
//!
//! The solver minimizes `-log det Θ + <S, Θ> + ρ ||Θ||_1` over positive
//! definite `Θ` with soft-thresholded gradient steps, Barzilai-Borwein step
//! seeding, backtracking on positive definiteness and a quadratic
//! majorization test, and duality-gap termination.
//!
//! Alongside the solver:
//! - [`solver`] also carries the eigenvalue bounds on the optimum and the
//!   closed-form linear rate they imply,
//! - [`oracle`] holds an independent dual solver, a Jacobi eigensolver and
//!   a KKT checker for cross-validation,
//! - [`datagen`] generates sparse well-conditioned models and Gaussian data,
//! - [`diagnostics`] and [`study`] turn solver traces into convergence-rate
//!   reports.
//!
//! ```
//! use gista::{solve, DenseSym, ProblemInstance, SolverConfig};
//!
//! let s = DenseSym::from_diag(&[1.0, 2.0, 3.0]);
//! let problem = ProblemInstance::new(s, 0.2).unwrap();
//! let result = solve(&problem, &SolverConfig::default().with_tol(1e-8), None).unwrap();
//! assert!((result.theta_star.get(0, 0) - 1.0 / 1.2).abs() < 1e-7);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod datagen;
pub mod diagnostics;
pub mod error;
pub mod io;
pub mod matrix;
pub mod oracle;
pub mod solver;
pub mod study;

pub use error::{Error, Result};
pub use matrix::{
    cholesky, inverse_from_chol, log_det_from_chol, power_iter_max_eig, soft_threshold, CholFactor, DenseSym,
};
pub use solver::{solve, solve_with, ProblemInstance, SolveResult, SolverConfig, SolverState, StepRule, Termination};
