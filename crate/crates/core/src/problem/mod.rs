//! The affine-parametric model problem `−(a(x, y) u′)′ = f` on (0, 1) in sequence form.

pub mod basis;
pub mod config;
pub mod field;
pub mod index;
pub mod legendre;
pub mod operator;
pub mod quadrature;
pub mod rhs;
pub mod sparse;

pub use basis::{HatBasis, SpatialBasis, SpatialIndex};
pub use config::ProblemConfig;
pub use field::{Coefficient, CoefficientField, Parameter, SpectralBounds};
pub use index::{IndexUniverse, SparseModeIndex, TailIndex};
pub use operator::{IndexSet, OperatorBlock, ParametricOperator, SolutionTensor};
pub use rhs::{assemble_rhs, Piece, RhsSource};
