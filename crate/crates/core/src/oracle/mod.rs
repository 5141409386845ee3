//! Brute-force reference implementations, independent of the main tensor kernels.

pub mod dense_problem;
pub mod dense_tensor;
pub mod fixtures;
pub mod product_set;
pub mod quadrature;

pub use dense_problem::{dense_galerkin_solve, DenseProblem, FlatIndex};
pub use product_set::best_product_set_bruteforce;
pub use quadrature::{adaptive_quadrature, gauss_legendre_moment};
