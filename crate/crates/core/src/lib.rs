//! One-step-back (OSB) coordinate-wise iteration for fixed-point problems
//! `X = H(X)`.
//!
//! The solver keeps a history vector `H` and a residual fluid vector `F`
//! with `H + F = H(H)` at all times. Each step picks a coordinate `i`, moves
//! `F[i]` into `H[i]` and adds the consequence of that move to `F`, so the
//! order of coordinates can be chosen from the current residuals (for
//! instance greedily, largest `|F[i]|` first). For a linear map this is the
//! D-iteration (fluid diffusion) update.
//!
//! ```
//! use osb::{run, Problem, StopRule};
//! use osb::strategies::Greedy;
//!
//! let problem = Problem::example3();
//! let out = run(&problem, &mut Greedy::new(), StopRule::new(1e-12, Some(300))).unwrap();
//! let estimate = osb::estimator(&out.state);
//! assert!((estimate[0] - 4.246792233393178).abs() < 1e-9);
//! ```
//!
//! Jacobi and Gauss-Seidel baselines live in [`baselines`]; [`bench`] turns
//! runs into comparable traces and CSV files.

pub mod baselines;
pub mod bench;
pub mod error;
pub mod operators;
mod problem;
mod run;
mod solver;
pub mod strategies;
pub mod testing;

pub use error::{MetricError, OperatorError, ProblemError, SolveError};
pub use operators::{Example3, Operator, SparseLinearOperator, SparseVector};
pub use problem::{Problem, FIXED_POINT_TOLERANCE};
pub use run::{run, OsbRun, OsbSolver, RunFailure, StopRule};
pub use solver::{estimator, init_state, osb_step, osb_step_verified, residual_norm, SolverState};
