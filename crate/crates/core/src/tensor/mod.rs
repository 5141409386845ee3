//! Hierarchical tensor format on the linear dimension tree with a sparse mode 0.

pub mod dense;
pub mod htensor;
pub mod index_set;
pub mod serialize;
pub mod sweep;
pub mod transfer;
pub mod tree;

pub use dense::DenseTensor;
pub use htensor::{HTensor, NodeData};
pub use index_set::{ModeKey, ProductIndexSet};
pub use transfer::{Slot, Transfer};
pub use tree::{DimensionTree, Edge, NodeId, NodeKind};
