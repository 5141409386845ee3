//! Thresholded Galerkin solver, residual approximation, expansion and the adaptive loop.

pub mod adaptive;
pub mod expand;
pub mod params;
pub mod residual;
pub mod st_solve;
pub mod trace;

pub use adaptive::{adaptive_solve, rhs_on, AdaptiveOptions, AdaptiveOutcome};
pub use expand::{expand, ExpandResult};
pub use params::SolverParams;
pub use residual::{res_approx, ResidualApprox};
pub use st_solve::{st_fixed_point, st_solve, StSolveOptions, StSolveResult};
pub use trace::{RunTrace, TraceRow};
