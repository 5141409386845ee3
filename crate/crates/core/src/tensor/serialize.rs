//! Versioned JSON form of [`HTensor`] for golden traces.
//!
//! ```text
//! {
//!   "magic": "HTSPARSE",
//!   "version": 1,
//!   "j": J,
//!   "support": { "mode0": [...], "modes": [[...], ...] },
//!   "frames": [ { "rows": n, "cols": r, "data": [column-major] }, ... ],   // modes 0..=J
//!   "transfers": [ { "node": id, "dims": [r_left, r_right, r_own], "data": [...] }, ... ]
//! }
//! ```
//!
//! The tree is always the linear tree for `j`, so only node ids are stored. Floats are
//! written in shortest round-trip form and read back bit-exactly.

use super::htensor::{HTensor, NodeData};
use super::index_set::{ModeKey, ProductIndexSet};
use super::transfer::Transfer;
use super::tree::DimensionTree;
use crate::error::TensorError;
use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

pub const MAGIC: &str = "HTSPARSE";
pub const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct FrameDoc {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct TransferDoc {
    node: usize,
    dims: [usize; 3],
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "K: Serialize", deserialize = "K: DeserializeOwned"))]
struct Doc<K> {
    magic: String,
    version: u32,
    j: usize,
    support: ProductIndexSet<K>,
    frames: Vec<FrameDoc>,
    transfers: Vec<TransferDoc>,
}

impl<K: ModeKey + Serialize> HTensor<K> {
    pub fn to_json(&self) -> Result<String, TensorError> {
        let tree = self.tree();
        let frames = (0..tree.num_modes())
            .map(|m| {
                let f = self.frame(m);
                FrameDoc { rows: f.nrows(), cols: f.ncols(), data: f.as_slice().to_vec() }
            })
            .collect();
        let transfers = (0..tree.num_nodes())
            .filter_map(|id| match self.node_data(id) {
                NodeData::Transfer(t) => Some(TransferDoc { node: id, dims: t.dims, data: t.data.clone() }),
                NodeData::Leaf(_) => None,
            })
            .collect();
        let doc = Doc { magic: MAGIC.into(), version: VERSION, j: self.j(), support: self.support().clone(), frames, transfers };
        serde_json::to_string(&doc).map_err(|e| TensorError::Format(e.to_string()))
    }
}

impl<K: ModeKey + DeserializeOwned> HTensor<K> {
    pub fn from_json(text: &str) -> Result<Self, TensorError> {
        let doc: Doc<K> = serde_json::from_str(text).map_err(|e| TensorError::Format(e.to_string()))?;
        if doc.magic != MAGIC {
            return Err(TensorError::Format(format!("bad magic {:?}", doc.magic)));
        }
        if doc.version != VERSION {
            return Err(TensorError::Format(format!("unsupported version {}", doc.version)));
        }
        if doc.support.j() != doc.j {
            return Err(TensorError::Format(format!("support has {} parametric modes, header says {}", doc.support.j(), doc.j)));
        }
        let tree = Arc::new(DimensionTree::linear(doc.j));
        let frames = doc
            .frames
            .into_iter()
            .map(|f| {
                if f.data.len() != f.rows * f.cols {
                    return Err(TensorError::Format(format!("frame {}x{} with {} entries", f.rows, f.cols, f.data.len())));
                }
                Ok(DMatrix::from_vec(f.rows, f.cols, f.data))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let transfers = doc
            .transfers
            .into_iter()
            .map(|t| {
                if t.node >= tree.num_nodes() {
                    return Err(TensorError::Format(format!("node {} out of range", t.node)));
                }
                if t.data.len() != t.dims.iter().product::<usize>() {
                    return Err(TensorError::Format(format!("transfer {} dims {:?} with {} entries", t.node, t.dims, t.data.len())));
                }
                Ok((t.node, Transfer { dims: t.dims, data: t.data }))
            })
            .collect::<Result<Vec<_>, _>>()?;
        HTensor::from_parts(tree, doc.support, frames, transfers)
    }
}
