//! Hierarchical tensors on the linear tree with a sparse mode 0.

use super::dense::DenseTensor;
use super::index_set::{merge_sorted, positions_in, ModeKey, ProductIndexSet};
use super::transfer::{Slot, Transfer};
use super::tree::{DimensionTree, NodeId, NodeKind};
use crate::error::TensorError;
use crate::linalg;
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq)]
pub enum NodeData {
    /// Leaf frame: rows follow the mode support, columns are the leaf rank.
    Leaf(DMatrix<f64>),
    /// Interior or root transfer tensor; the root has own dimension 1.
    Transfer(Transfer),
}

impl NodeData {
    pub fn rank(&self) -> usize {
        match self {
            NodeData::Leaf(m) => m.ncols(),
            NodeData::Transfer(t) => t.dims[2],
        }
    }
}

/// A hierarchical tensor. Values are immutable in the API: every operation returns a new tensor.
#[derive(Clone, Debug)]
pub struct HTensor<K> {
    pub(crate) tree: Arc<DimensionTree>,
    pub(crate) support: ProductIndexSet<K>,
    pub(crate) nodes: Vec<NodeData>,
    /// Orthogonality center: every other node is orthonormal toward it.
    pub(crate) center: Option<NodeId>,
}

impl<K: ModeKey> HTensor<K> {
    /// The zero tensor on `support` (all ranks 0).
    pub fn zero(tree: Arc<DimensionTree>, support: ProductIndexSet<K>) -> Self {
        assert_eq!(tree.j(), support.j(), "support does not match tree");
        let nodes = (0..tree.num_nodes())
            .map(|id| match tree.node(id).kind {
                NodeKind::Leaf(m) => NodeData::Leaf(DMatrix::zeros(support.mode_len(m), 0)),
                NodeKind::Interior => NodeData::Transfer(Transfer::zeros([0, 0, 0])),
                NodeKind::Root => NodeData::Transfer(Transfer::zeros([0, 0, 1])),
            })
            .collect();
        HTensor { tree, support, nodes, center: None }
    }

    /// Rank-one tensor `v_0 ⊗ v_1 ⊗ … ⊗ v_J` with vectors given over the supports.
    pub fn rank_one(tree: Arc<DimensionTree>, support: ProductIndexSet<K>, vectors: Vec<DVector<f64>>) -> Result<Self, TensorError> {
        if vectors.len() != tree.num_modes() {
            return Err(TensorError::Shape(format!("expected {} vectors, got {}", tree.num_modes(), vectors.len())));
        }
        for (m, v) in vectors.iter().enumerate() {
            if v.len() != support.mode_len(m) {
                return Err(TensorError::Shape(format!("mode {m}: vector length {} vs support {}", v.len(), support.mode_len(m))));
            }
        }
        let nodes = (0..tree.num_nodes())
            .map(|id| match tree.node(id).kind {
                NodeKind::Leaf(m) => NodeData::Leaf(DMatrix::from_column_slice(vectors[m].len(), 1, vectors[m].as_slice())),
                _ => NodeData::Transfer(Transfer { dims: [1, 1, 1], data: vec![1.0] }),
            })
            .collect();
        Ok(HTensor { tree, support, nodes, center: None }.canonical())
    }

    /// Assembles a tensor from explicit frames (per mode) and transfer tensors (per interior node, root included).
    pub fn from_parts(
        tree: Arc<DimensionTree>,
        support: ProductIndexSet<K>,
        frames: Vec<DMatrix<f64>>,
        transfers: Vec<(NodeId, Transfer)>,
    ) -> Result<Self, TensorError> {
        if frames.len() != tree.num_modes() {
            return Err(TensorError::Shape("frame count".into()));
        }
        let mut nodes: Vec<Option<NodeData>> = vec![None; tree.num_nodes()];
        for (m, f) in frames.into_iter().enumerate() {
            if f.nrows() != support.mode_len(m) {
                return Err(TensorError::Shape(format!("mode {m}: frame rows {} vs support {}", f.nrows(), support.mode_len(m))));
            }
            nodes[tree.leaf(m)] = Some(NodeData::Leaf(f));
        }
        for (id, t) in transfers {
            if tree.is_leaf(id) {
                return Err(TensorError::Shape(format!("node {id} is a leaf")));
            }
            nodes[id] = Some(NodeData::Transfer(t));
        }
        let nodes: Vec<NodeData> = nodes
            .into_iter()
            .enumerate()
            .map(|(id, n)| n.ok_or_else(|| TensorError::Shape(format!("missing data for node {id}"))))
            .collect::<Result<_, _>>()?;
        let out = HTensor { tree, support, nodes, center: None };
        out.check_dims()?;
        Ok(out.canonical())
    }

    fn check_dims(&self) -> Result<(), TensorError> {
        for id in 0..self.tree.num_nodes() {
            if let Some([a, b]) = self.tree.node(id).children {
                let t = self.transfer(id);
                if t.dims[0] != self.nodes[a].rank() || t.dims[1] != self.nodes[b].rank() {
                    return Err(TensorError::Shape(format!(
                        "node {id}: transfer dims {:?} vs child ranks ({}, {})",
                        t.dims,
                        self.nodes[a].rank(),
                        self.nodes[b].rank()
                    )));
                }
                if id == 0 && t.dims[2] != 1 {
                    return Err(TensorError::Shape("root own dimension must be 1".into()));
                }
            }
        }
        Ok(())
    }

    /// Replaces any structurally zero tensor by the all-ranks-0 representation.
    pub(crate) fn canonical(self) -> Self {
        let zero = self.nodes.iter().enumerate().any(|(id, n)| match n {
            NodeData::Leaf(m) => m.nrows() == 0 || m.ncols() == 0,
            NodeData::Transfer(t) => t.is_empty() || (id != 0 && t.dims[2] == 0),
        });
        if zero {
            HTensor::zero(self.tree, self.support)
        } else {
            self
        }
    }

    pub fn tree(&self) -> &DimensionTree {
        &self.tree
    }

    pub fn tree_arc(&self) -> Arc<DimensionTree> {
        self.tree.clone()
    }

    pub fn j(&self) -> usize {
        self.tree.j()
    }

    pub fn support(&self) -> &ProductIndexSet<K> {
        &self.support
    }

    pub fn center(&self) -> Option<NodeId> {
        self.center
    }

    pub fn is_zero(&self) -> bool {
        self.nodes[1].rank() == 0
    }

    pub fn frame(&self, mode: usize) -> &DMatrix<f64> {
        match &self.nodes[self.tree.leaf(mode)] {
            NodeData::Leaf(m) => m,
            _ => unreachable!(),
        }
    }

    pub fn transfer(&self, id: NodeId) -> &Transfer {
        match &self.nodes[id] {
            NodeData::Transfer(t) => t,
            _ => panic!("node {id} is a leaf"),
        }
    }

    pub fn node_data(&self, id: NodeId) -> &NodeData {
        &self.nodes[id]
    }

    /// Representation rank of every effective edge, in sweep order.
    pub fn edge_ranks(&self) -> Vec<usize> {
        self.tree.edges().iter().map(|e| self.nodes[e.node].rank()).collect()
    }

    pub fn max_rank(&self) -> usize {
        self.edge_ranks().into_iter().max().unwrap_or(0)
    }

    /// Number of stored floating-point entries (frames plus transfer tensors).
    pub fn num_entries(&self) -> usize {
        self.nodes
            .iter()
            .map(|n| match n {
                NodeData::Leaf(m) => m.len(),
                NodeData::Transfer(t) => t.data.len(),
            })
            .sum()
    }

    /// `a * s`.
    pub fn scale(&self, s: f64) -> Self {
        if s == 0.0 || self.is_zero() {
            return HTensor::zero(self.tree.clone(), self.support.clone());
        }
        let mut out = self.clone();
        let id = self.center.unwrap_or(0);
        out.nodes[id] = match &out.nodes[id] {
            NodeData::Leaf(m) => NodeData::Leaf(m * s),
            NodeData::Transfer(t) => {
                NodeData::Transfer(Transfer { dims: t.dims, data: t.data.iter().map(|x| x * s).collect() })
            }
        };
        out
    }

    /// Same tensor stored over a larger support (zero rows added).
    pub fn embed(&self, support: &ProductIndexSet<K>) -> Self {
        let mut out = self.clone();
        for m in 0..=self.j() {
            let (old_len, new_len) = (self.support.mode_len(m), support.mode_len(m));
            if old_len == new_len {
                continue;
            }
            let pos = if m == 0 {
                positions_in(&self.support.mode0, &support.mode0)
            } else {
                positions_in(&self.support.modes[m - 1], &support.modes[m - 1])
            };
            let f = self.frame(m);
            let mut g = DMatrix::zeros(new_len, f.ncols());
            for (r, p) in pos.iter().enumerate() {
                let p = p.expect("embed target must contain the support");
                g.row_mut(p).copy_from(&f.row(r));
            }
            out.nodes[self.tree.leaf(m)] = NodeData::Leaf(g);
        }
        out.support = support.clone();
        out
    }

    /// `a + b` with block-diagonal cores over the union support; ranks add.
    pub fn add(&self, other: &Self) -> Result<Self, TensorError> {
        if self.j() != other.j() {
            return Err(TensorError::Tree(format!("J = {} vs {}", self.j(), other.j())));
        }
        let support = self.support.union(&other.support);
        if other.is_zero() {
            return Ok(self.embed(&support));
        }
        if self.is_zero() {
            return Ok(other.embed(&support));
        }
        let a = self.embed(&support);
        let b = other.embed(&support);
        let tree = &self.tree;
        let nodes = (0..tree.num_nodes())
            .map(|id| match (&a.nodes[id], &b.nodes[id]) {
                (NodeData::Leaf(fa), NodeData::Leaf(fb)) => {
                    let mut f = DMatrix::zeros(fa.nrows(), fa.ncols() + fb.ncols());
                    f.columns_mut(0, fa.ncols()).copy_from(fa);
                    f.columns_mut(fa.ncols(), fb.ncols()).copy_from(fb);
                    NodeData::Leaf(f)
                }
                (NodeData::Transfer(ta), NodeData::Transfer(tb)) => {
                    let own = if id == 0 { [0, 0] } else { [ta.dims[2], tb.dims[2]] };
                    let dims = [ta.dims[0] + tb.dims[0], ta.dims[1] + tb.dims[1], if id == 0 { 1 } else { own[0] + own[1] }];
                    let mut t = Transfer::zeros(dims);
                    for l in 0..ta.dims[2] {
                        for m in 0..ta.dims[1] {
                            for k in 0..ta.dims[0] {
                                t.set(k, m, l, ta.get(k, m, l));
                            }
                        }
                    }
                    for l in 0..tb.dims[2] {
                        for m in 0..tb.dims[1] {
                            for k in 0..tb.dims[0] {
                                t.set(k + ta.dims[0], m + ta.dims[1], l + own[0], tb.get(k, m, l));
                            }
                        }
                    }
                    NodeData::Transfer(t)
                }
                _ => unreachable!(),
            })
            .collect();
        Ok(HTensor { tree: self.tree.clone(), support, nodes, center: None })
    }

    /// `Σ_t v_t` where `v_t` carries this tensor's transfers, the frame `terms[t]` lists on its
    /// active modes and `shared[m]` on every other mode. The sum is assembled exactly with
    /// block-structured transfers: a node keeps one channel per term active below it plus one
    /// shared channel, so no intermediate recompression is needed.
    pub fn kronecker_sum(
        &self,
        support: ProductIndexSet<K>,
        shared: Vec<DMatrix<f64>>,
        terms: &[Vec<(usize, DMatrix<f64>)>],
    ) -> Result<Self, TensorError> {
        let tree = self.tree.clone();
        if self.is_zero() || terms.is_empty() {
            return Ok(HTensor::zero(tree, support));
        }
        let n = tree.num_nodes();
        let active = |id: NodeId, t: usize| {
            let nd = tree.node(id);
            terms[t].iter().any(|(m, _)| (nd.first_mode..=nd.last_mode).contains(m))
        };
        // channels[id][t]: block of term t at node id; `shared_ch[id]` is the block of inactive terms.
        let mut channels: Vec<Vec<usize>> = vec![vec![0; terms.len()]; n];
        let mut count = vec![0usize; n];
        for id in 0..n {
            let any_inactive = (0..terms.len()).any(|t| !active(id, t));
            let mut next = usize::from(any_inactive);
            for t in 0..terms.len() {
                if active(id, t) {
                    channels[id][t] = next;
                    next += 1;
                }
            }
            count[id] = next;
        }
        let mut frames = shared;
        for (m, frame) in frames.iter_mut().enumerate() {
            let id = tree.leaf(m);
            let u = self.frame(m);
            if frame.shape() != (support.mode_len(m), u.ncols()) {
                return Err(TensorError::Shape(format!("mode {m}: shared frame shape {:?}", frame.shape())));
            }
            let r = u.ncols();
            let mut f = DMatrix::zeros(support.mode_len(m), count[id] * r);
            if count[id] > (0..terms.len()).filter(|&t| active(id, t)).count() {
                f.columns_mut(0, r).copy_from(frame);
            }
            for (t, term) in terms.iter().enumerate() {
                for (tm, g) in term {
                    if *tm == m {
                        if g.shape() != (support.mode_len(m), r) {
                            return Err(TensorError::Shape(format!("term {t}, mode {m}: frame shape {:?}", g.shape())));
                        }
                        f.columns_mut(channels[id][t] * r, r).copy_from(g);
                    }
                }
            }
            *frame = f;
        }
        let mut transfers = Vec::new();
        for id in 0..n {
            let Some([a, b]) = tree.node(id).children else { continue };
            let src = self.transfer(id);
            let [ra, rb, rs] = src.dims;
            let own = if id == 0 { 1 } else { count[id] };
            let mut t = Transfer::zeros([count[a] * ra, count[b] * rb, own * rs]);
            let mut place = |ca: usize, cb: usize, cs: usize| {
                for l in 0..rs {
                    for m in 0..rb {
                        for k in 0..ra {
                            let v = t.get(ca * ra + k, cb * rb + m, cs * rs + l) + src.get(k, m, l);
                            t.set(ca * ra + k, cb * rb + m, cs * rs + l, v);
                        }
                    }
                }
            };
            if id == 0 {
                for tt in 0..terms.len() {
                    place(channels[a][tt], channels[b][tt], 0);
                }
            } else {
                if let Some(tt) = (0..terms.len()).find(|&tt| !active(id, tt)) {
                    place(channels[a][tt], channels[b][tt], 0);
                }
                for tt in (0..terms.len()).filter(|&tt| active(id, tt)) {
                    place(channels[a][tt], channels[b][tt], channels[id][tt]);
                }
            }
            transfers.push((id, t));
        }
        HTensor::from_parts(tree, support, frames, transfers)
    }

    /// Same transfer tensors with every leaf frame replaced (rows over the new `support`).
    pub fn with_frames(&self, support: ProductIndexSet<K>, frames: Vec<DMatrix<f64>>) -> Result<Self, TensorError> {
        if self.is_zero() {
            return Ok(HTensor::zero(self.tree.clone(), support));
        }
        let transfers = (0..self.tree.num_nodes())
            .filter(|&id| !self.tree.is_leaf(id))
            .map(|id| (id, self.transfer(id).clone()))
            .collect();
        HTensor::from_parts(self.tree.clone(), support, frames, transfers)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, TensorError> {
        self.add(&other.scale(-1.0))
    }

    /// `R_Λ a`: drops all rows outside `set`; the new support is the intersection.
    pub fn restrict(&self, set: &ProductIndexSet<K>) -> Self {
        let support = self.support.intersection(set);
        if support.is_empty() || self.is_zero() {
            return HTensor::zero(self.tree.clone(), support);
        }
        let mut out = self.clone();
        let mut changed = false;
        for m in 0..=self.j() {
            if support.mode_len(m) == self.support.mode_len(m) {
                continue;
            }
            changed = true;
            let pos = if m == 0 {
                positions_in(&support.mode0, &self.support.mode0)
            } else {
                positions_in(&support.modes[m - 1], &self.support.modes[m - 1])
            };
            let f = self.frame(m);
            let mut g = DMatrix::zeros(pos.len(), f.ncols());
            for (r, p) in pos.iter().enumerate() {
                g.row_mut(r).copy_from(&f.row(p.expect("intersection row")));
            }
            out.nodes[self.tree.leaf(m)] = NodeData::Leaf(g);
        }
        out.support = support;
        if changed {
            out.center = None;
        }
        out
    }

    /// Euclidean inner product via bottom-up Gram matrices.
    pub fn inner(&self, other: &Self) -> Result<f64, TensorError> {
        if self.j() != other.j() {
            return Err(TensorError::Tree("inner product of different trees".into()));
        }
        if self.is_zero() || other.is_zero() {
            return Ok(0.0);
        }
        let tree = &self.tree;
        let mut grams: Vec<Option<DMatrix<f64>>> = vec![None; tree.num_nodes()];
        for id in tree.postorder() {
            let g = match tree.node(id).kind {
                NodeKind::Leaf(m) => {
                    let (pa, pb) = common_rows(&self.support, &other.support, m);
                    let fa = self.frame(m);
                    let fb = other.frame(m);
                    let mut g = DMatrix::zeros(fa.ncols(), fb.ncols());
                    for (&ra, &rb) in pa.iter().zip(&pb) {
                        g += fa.row(ra).transpose() * fb.row(rb);
                    }
                    g
                }
                _ => {
                    let [c0, c1] = tree.node(id).children.unwrap();
                    let ta = self.transfer(id);
                    let tb = other.transfer(id);
                    let t1 = tb.mode_product(Slot::Left, grams[c0].as_ref().unwrap());
                    let t2 = t1.mode_product(Slot::Right, grams[c1].as_ref().unwrap());
                    ta.as_matrix().transpose() * t2.as_matrix()
                }
            };
            grams[id] = Some(g);
        }
        Ok(grams[0].as_ref().unwrap()[(0, 0)])
    }

    /// Expands frame/transfer products into the node basis matrix (rows row-major over node modes).
    fn node_basis(&self, id: NodeId) -> DMatrix<f64> {
        match &self.nodes[id] {
            NodeData::Leaf(m) => m.clone(),
            NodeData::Transfer(t) => {
                let [c0, c1] = self.tree.node(id).children.unwrap();
                let ua = self.node_basis(c0);
                let ub = self.node_basis(c1);
                let (na, nb) = (ua.nrows(), ub.nrows());
                let mut out = DMatrix::zeros(na * nb, t.dims[2]);
                let block = t.dims[0] * t.dims[1];
                for l in 0..t.dims[2] {
                    let bl = DMatrix::from_column_slice(t.dims[0], t.dims[1], &t.data[l * block..(l + 1) * block]);
                    let c = &ua * bl * ub.transpose();
                    for i in 0..na {
                        for k in 0..nb {
                            out[(i * nb + k, l)] = c[(i, k)];
                        }
                    }
                }
                out
            }
        }
    }

    /// Dense array over the support product (mode 0 slowest).
    pub fn to_dense(&self) -> Result<DenseTensor, TensorError> {
        let shape = self.support.mode_lens();
        let mut t = DenseTensor::zeros(shape)?;
        if self.is_zero() || t.is_empty() {
            return Ok(t);
        }
        let b = self.node_basis(0);
        t.data.copy_from_slice(b.column(0).as_slice());
        Ok(t)
    }

    /// Dense array over an arbitrary product set (entries outside drop, missing ones are zero).
    pub fn to_dense_on(&self, set: &ProductIndexSet<K>) -> Result<DenseTensor, TensorError> {
        let inner = self.restrict(set);
        let full = inner.embed(&merge_support(&inner.support, set));
        full.to_dense()
    }

    /// Hierarchical SVD of a dense array given over `support` (exact up to the rank cutoff).
    pub fn from_dense(tree: Arc<DimensionTree>, support: ProductIndexSet<K>, dense: &DenseTensor) -> Result<Self, TensorError> {
        let shape = support.mode_lens();
        if dense.shape != shape {
            return Err(TensorError::Shape(format!("dense shape {:?} vs support {:?}", dense.shape, shape)));
        }
        if dense.data.iter().all(|&x| x == 0.0) {
            return Ok(HTensor::zero(tree, support));
        }
        let mut bases: Vec<Option<DMatrix<f64>>> = vec![None; tree.num_nodes()];
        let mut nodes: Vec<Option<NodeData>> = vec![None; tree.num_nodes()];
        for id in tree.postorder() {
            let node = tree.node(id);
            let rows: Vec<usize> = (node.first_mode..=node.last_mode).collect();
            let target = if id == 0 {
                DMatrix::from_column_slice(dense.len(), 1, &dense.data)
            } else {
                let m = dense.matricize(&rows);
                let d = linalg::svd(&m);
                let k = linalg::numerical_rank(&d.s);
                linalg::leading_columns(&d.u, k)
            };
            match node.children {
                None => {
                    nodes[id] = Some(NodeData::Leaf(target.clone()));
                }
                Some([c0, c1]) => {
                    let ua = bases[c0].as_ref().unwrap();
                    let ub = bases[c1].as_ref().unwrap();
                    let (na, nb) = (ua.nrows(), ub.nrows());
                    let mut t = Transfer::zeros([ua.ncols(), ub.ncols(), target.ncols()]);
                    for l in 0..target.ncols() {
                        let y = DMatrix::from_fn(na, nb, |i, k| target[(i * nb + k, l)]);
                        let bl = ua.transpose() * y * ub;
                        for m in 0..ub.ncols() {
                            for k in 0..ua.ncols() {
                                t.set(k, m, l, bl[(k, m)]);
                            }
                        }
                    }
                    nodes[id] = Some(NodeData::Transfer(t));
                }
            }
            bases[id] = Some(target);
        }
        let nodes = nodes.into_iter().map(|n| n.unwrap()).collect();
        Ok(HTensor { tree, support, nodes, center: None }.canonical())
    }
}

fn merge_support<K: ModeKey>(a: &ProductIndexSet<K>, b: &ProductIndexSet<K>) -> ProductIndexSet<K> {
    ProductIndexSet {
        mode0: merge_sorted(&a.mode0, &b.mode0),
        modes: a.modes.iter().zip(&b.modes).map(|(x, y)| merge_sorted(x, y)).collect(),
    }
}

fn common_rows<K: ModeKey>(a: &ProductIndexSet<K>, b: &ProductIndexSet<K>, m: usize) -> (Vec<usize>, Vec<usize>) {
    fn walk<T: Ord>(x: &[T], y: &[T]) -> (Vec<usize>, Vec<usize>) {
        let (mut i, mut j) = (0, 0);
        let (mut pa, mut pb) = (Vec::new(), Vec::new());
        while i < x.len() && j < y.len() {
            match x[i].cmp(&y[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    pa.push(i);
                    pb.push(j);
                    i += 1;
                    j += 1;
                }
            }
        }
        (pa, pb)
    }
    if m == 0 {
        walk(&a.mode0, &b.mode0)
    } else {
        walk(&a.modes[m - 1], &b.modes[m - 1])
    }
}
