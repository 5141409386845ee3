//! Gauge moves and edge sweeps: orthogonalization, edge spectra, soft thresholding,
//! rounding and mode contractions.

use super::htensor::{HTensor, NodeData};
use super::index_set::ModeKey;
use super::transfer::{Slot, Transfer};
use super::tree::NodeId;
use crate::linalg::{self, RANK_CUTOFF};
use nalgebra::DMatrix;

/// What to do with the singular values of each edge during a sweep.
#[derive(Clone, Copy, Debug)]
enum EdgeAction {
    Observe,
    Soft(f64),
    Truncate(f64),
}

impl<K: ModeKey> HTensor<K> {
    /// Bottom-up QR so every non-root node is orthonormal; the root becomes the center.
    fn orthogonalize_in_place(&mut self) {
        if self.is_zero() {
            self.center = Some(0);
            return;
        }
        let tree = self.tree.clone();
        for id in tree.postorder() {
            if id == 0 {
                continue;
            }
            self.push_up(id);
            if self.is_degenerate() {
                *self = HTensor::zero(self.tree.clone(), self.support.clone());
                self.center = Some(0);
                return;
            }
        }
        self.center = Some(0);
    }

    fn is_degenerate(&self) -> bool {
        self.nodes.iter().any(|n| n.rank() == 0)
    }

    /// QR of node `id` along its own index; the triangular factor moves into the parent.
    fn push_up(&mut self, id: NodeId) {
        let parent = self.tree.node(id).parent.expect("push_up on root");
        let slot = Slot::child(self.tree.child_slot(parent, id));
        let r = match &self.nodes[id] {
            NodeData::Leaf(f) => {
                let (q, r) = linalg::qr_thin(f);
                self.nodes[id] = NodeData::Leaf(q);
                r
            }
            NodeData::Transfer(t) => {
                let (q, r) = linalg::qr_thin(&t.as_matrix());
                self.nodes[id] = NodeData::Transfer(Transfer::from_matrix(t.dims[0], t.dims[1], &q));
                r
            }
        };
        let pt = self.transfer(parent).mode_product(slot, &r);
        self.nodes[parent] = NodeData::Transfer(pt);
    }

    /// Moves the center from `id` to its child `child`.
    fn push_down(&mut self, id: NodeId, child: NodeId) {
        let slot = Slot::child(self.tree.child_slot(id, child));
        let t = self.transfer(id).clone();
        let x = t.unfold(slot);
        let (q, r) = linalg::qr_thin(&x.transpose());
        let others = match slot {
            Slot::Left => [t.dims[1], t.dims[2]],
            _ => [t.dims[0], t.dims[2]],
        };
        self.nodes[id] = NodeData::Transfer(Transfer::fold(slot, &q.transpose(), others));
        self.nodes[child] = match &self.nodes[child] {
            NodeData::Leaf(f) => NodeData::Leaf(f * r.transpose()),
            NodeData::Transfer(c) => NodeData::Transfer(c.mode_product(Slot::Own, &r)),
        };
    }

    /// Moves the orthogonality center to `target`, orthogonalizing first if needed.
    fn move_center(&mut self, target: NodeId) {
        if self.center.is_none() {
            self.orthogonalize_in_place();
        }
        if self.is_zero() {
            self.center = Some(target);
            return;
        }
        let tree = self.tree.clone();
        let mut cur = self.center.unwrap();
        while !tree.is_ancestor(cur, target) {
            let p = tree.node(cur).parent.unwrap();
            self.push_up(cur);
            cur = p;
        }
        while cur != target {
            let [a, b] = tree.node(cur).children.unwrap();
            let next = if tree.is_ancestor(a, target) { a } else { b };
            self.push_down(cur, next);
            cur = next;
        }
        self.center = Some(target);
        if self.is_degenerate() {
            *self = HTensor::zero(self.tree.clone(), self.support.clone());
            self.center = Some(target);
        }
    }

    /// Returns a copy with orthogonality center at `node`.
    pub fn orthogonalize(&self, node: NodeId) -> Self {
        let mut out = self.clone();
        out.move_center(node);
        out
    }

    /// Frobenius norm, computed from an orthogonalized copy.
    pub fn norm(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let mut t = self.clone();
        if t.center.is_none() {
            t.orthogonalize_in_place();
        }
        let c = t.center.unwrap();
        if t.is_zero() {
            return 0.0;
        }
        match &t.nodes[c] {
            NodeData::Leaf(f) => f.norm(),
            NodeData::Transfer(tr) => tr.data.iter().map(|x| x * x).sum::<f64>().sqrt(),
        }
    }

    /// Runs the sweep over all effective edges in the fixed order.
    fn sweep(&mut self, action: EdgeAction) -> Vec<Vec<f64>> {
        let tree = self.tree.clone();
        let mut spectra = Vec::with_capacity(tree.num_edges());
        for e in tree.edges() {
            if self.is_zero() {
                spectra.push(Vec::new());
                continue;
            }
            let t = e.node;
            let p = tree.node(t).parent.unwrap();
            self.move_center(p);
            if self.is_zero() {
                spectra.push(Vec::new());
                continue;
            }
            let slot = Slot::child(tree.child_slot(p, t));
            let k = self.transfer(p).unfold(slot);
            let d = linalg::svd(&k);
            let keep_rank = linalg::numerical_rank(&d.s);
            let sigma: Vec<f64> = d.s[..keep_rank].to_vec();
            let new_sigma: Vec<f64> = match action {
                EdgeAction::Observe => {
                    spectra.push(sigma);
                    continue;
                }
                EdgeAction::Soft(tau) => sigma.iter().map(|&s| (s - tau).max(0.0)).collect(),
                EdgeAction::Truncate(rel) => {
                    let s0 = sigma.first().copied().unwrap_or(0.0);
                    sigma.iter().map(|&s| if s > rel * s0 { s } else { 0.0 }).collect()
                }
            };
            spectra.push(sigma.clone());
            let kept = new_sigma.iter().take_while(|&&x| x > 0.0).count();
            if kept == 0 {
                let c = self.center;
                *self = HTensor::zero(self.tree.clone(), self.support.clone());
                self.center = c;
                continue;
            }
            let w = linalg::leading_columns(&d.u, kept);
            let mut dwt = w.transpose();
            for i in 0..kept {
                let f = new_sigma[i] / sigma[i];
                dwt.row_mut(i).scale_mut(f);
            }
            self.nodes[t] = match &self.nodes[t] {
                NodeData::Leaf(f) => NodeData::Leaf(f * &w),
                NodeData::Transfer(c) => NodeData::Transfer(c.mode_product(Slot::Own, &w.transpose())),
            };
            let pt = self.transfer(p).mode_product(slot, &dwt);
            self.nodes[p] = NodeData::Transfer(pt);
        }
        spectra
    }

    /// Singular values (above the rank cutoff) of every effective edge, in sweep order.
    pub fn edge_singular_values(&self) -> Vec<Vec<f64>> {
        let mut t = self.clone();
        t.sweep(EdgeAction::Observe)
    }

    /// Soft thresholding `ST_τ`: edge-wise `σ ↦ max(σ − τ, 0)` in the fixed sweep order.
    pub fn soft_threshold(&self, tau: f64) -> Self {
        assert!(tau >= 0.0, "threshold must be nonnegative");
        let mut t = self.clone();
        t.sweep(EdgeAction::Soft(tau));
        t
    }

    /// Quasi-exact recompression dropping singular values at or below `rel * σ_max` per edge.
    pub fn round(&self, rel: f64) -> Self {
        let mut t = self.clone();
        t.sweep(EdgeAction::Truncate(rel.max(RANK_CUTOFF)));
        t
    }

    /// Recompression at the numerical rank cutoff.
    pub fn recompress(&self) -> Self {
        self.round(RANK_CUTOFF)
    }

    /// Mode contractions `π^(j)` for every mode, aligned with the mode supports.
    pub fn contractions(&self) -> Vec<Vec<f64>> {
        let mut t = self.clone();
        let tree = self.tree.clone();
        let mut out = vec![Vec::new(); tree.num_modes()];
        for (m, slot_out) in out.iter_mut().enumerate() {
            let leaf = tree.leaf(m);
            let n = self.support.mode_len(m);
            if t.is_zero() {
                *slot_out = vec![0.0; n];
                continue;
            }
            let p = tree.node(leaf).parent.unwrap();
            t.move_center(p);
            let slot = Slot::child(tree.child_slot(p, leaf));
            let k = t.transfer(p).unfold(slot);
            let g = &k * k.transpose();
            let u = t.frame(m);
            let ug = u * &g;
            *slot_out = (0..n)
                .map(|r| {
                    let v: f64 = ug.row(r).iter().zip(u.row(r).iter()).map(|(a, b)| a * b).sum();
                    v.max(0.0).sqrt()
                })
                .collect();
        }
        out
    }

    /// Largest absolute difference between two dense expansions on their joint support.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64, crate::error::TensorError> {
        let d = self.sub(other)?.to_dense()?;
        Ok(d.data.iter().fold(0.0f64, |a, &b| a.max(b.abs())))
    }
}

/// Squared row norms of a frame, handy for coarsening bounds.
pub fn row_norms_sq(m: &DMatrix<f64>) -> Vec<f64> {
    (0..m.nrows()).map(|r| m.row(r).norm_squared()).collect()
}
