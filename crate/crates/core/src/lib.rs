//! Adaptive low-rank Galerkin solver for affine-parametric diffusion problems.
//!
//! The solution coefficients live in a hierarchical tensor whose mode 0 jointly
//! indexes spatial wavelets and the Legendre degrees of the tail parameters,
//! while each of the leading parameters owns a separate tensor mode.

pub mod bench;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod problem;
pub mod solver;
pub mod tensor;

pub use error::{BenchError, ProblemError, SolverError, TensorError};
