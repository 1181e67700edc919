//! Last-iterate extragradient solvers for constrained monotone variational
//! inequalities.
//!
//! Given a closed convex set `Z` and a monotone operator `F`, the solvers in
//! this crate look for `z*` in `Z` with `<F(z*), z - z*> >= 0` for every
//! feasible `z`. Convex-concave saddle point problems reduce to this form
//! with `F(x, y) = (grad_x phi, -grad_y phi)`.
//!
//! The crate is organised as follows:
//!
//! * [`point`], [`set`], [`problem`], [`config`] and [`trace`] hold the shared
//!   data model: points, feasible sets, problems, solver configuration and
//!   per-iteration records.
//! * [`projection`] provides exact Euclidean projections for every
//!   [`FeasibleSet`] variant together with a brute-force active-set oracle.
//! * [`metrics`] implements the extragradient, natural and tangent residuals
//!   and the closed-form matrix game gap.
//! * [`solver`] contains the extragradient step, the fixed-step baseline, the
//!   adaptive stepsize method and both backtracking variants.
//! * [`problems`] generates the benchmark families (matrix games, LASSO,
//!   minimax group fairness, double-scaled linx relaxations of MESP).
//! * [`bench`] is the experiment harness behind the `egvi` binary.
//!
//! ```
//! use egvi::{problems, solver, Algorithm, SolverConfig, StopReason};
//!
//! let game = problems::make_matrix_game(20, 1.0, 7).unwrap();
//! let config = SolverConfig {
//!     algorithm: Algorithm::PfNeEg,
//!     eta0: 0.5,
//!     max_iter: 20_000,
//!     residual_tol: 1e-8,
//!     ..SolverConfig::default()
//! };
//! let result = solver::solve(&game, &config).unwrap();
//! assert_eq!(result.stop_reason, StopReason::TolReached);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod config;
pub mod error;
pub mod metrics;
pub mod point;
pub mod problem;
pub mod problems;
pub mod projection;
pub mod set;
pub mod solver;
pub mod trace;

pub use config::{Algorithm, ErgodicWeights, LambdaSchedule, MetricSet, SolverConfig, StopMetric};
pub use error::{Error, Result};
pub use point::Point;
pub use problem::{evaluate_operator, GapOracle, Operator, VIProblem};
pub use set::{check_feasible, FeasibleSet};
pub use trace::{IterationRecord, SolveResult, StopReason};
