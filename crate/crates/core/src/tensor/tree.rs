//! Linear dimension tree over modes `0..=J`.
//!
//! Node layout (ids): `0` is the root `{0..J}`, `1` is the leaf `{0}`, then for
//! `i = 1..J-1` the interior node `{i..J}` sits at `2i` and the leaf `{i}` at
//! `2i+1`; the last leaf `{J}` is `2J`. Every tensor in this crate uses it.

use serde::{Deserialize, Serialize};

pub type NodeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeKind {
    Root,
    Interior,
    Leaf(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeNode {
    pub kind: NodeKind,
    /// Modes covered by the node, always a contiguous range.
    pub first_mode: usize,
    pub last_mode: usize,
    pub parent: Option<NodeId>,
    pub children: Option<[NodeId; 2]>,
}

/// An effective edge: the matricization rank of `node` equals the rank of its complement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub node: NodeId,
    pub first_mode: usize,
    pub last_mode: usize,
}

impl Edge {
    pub fn label(&self) -> String {
        if self.first_mode == self.last_mode {
            format!("{{{}}}", self.first_mode)
        } else {
            format!("{{{}..{}}}", self.first_mode, self.last_mode)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionTree {
    j: usize,
    nodes: Vec<TreeNode>,
    edges: Vec<Edge>,
}

impl DimensionTree {
    /// Builds the linear tree for `j >= 1` parametric modes plus mode 0.
    pub fn linear(j: usize) -> Self {
        assert!(j >= 1, "linear tree needs at least one parametric mode");
        let n = 2 * j + 1;
        let mut nodes = vec![
            TreeNode {
                kind: NodeKind::Root,
                first_mode: 0,
                last_mode: j,
                parent: None,
                children: None,
            };
            n
        ];
        nodes[0].children = Some([1, 2]);
        nodes[1] = TreeNode {
            kind: NodeKind::Leaf(0),
            first_mode: 0,
            last_mode: 0,
            parent: Some(0),
            children: None,
        };
        for i in 1..j {
            let id = 2 * i;
            nodes[id] = TreeNode {
                kind: NodeKind::Interior,
                first_mode: i,
                last_mode: j,
                parent: Some(if i == 1 { 0 } else { 2 * (i - 1) }),
                children: Some([2 * i + 1, 2 * i + 2]),
            };
            nodes[id + 1] = TreeNode {
                kind: NodeKind::Leaf(i),
                first_mode: i,
                last_mode: i,
                parent: Some(id),
                children: None,
            };
        }
        nodes[2 * j] = TreeNode {
            kind: NodeKind::Leaf(j),
            first_mode: j,
            last_mode: j,
            parent: Some(if j == 1 { 0 } else { 2 * (j - 1) }),
            children: None,
        };

        let mut edges = vec![Edge { node: 1, first_mode: 0, last_mode: 0 }];
        if j >= 2 {
            for m in 1..=j {
                let node = Self::leaf_id(j, m);
                edges.push(Edge { node, first_mode: m, last_mode: m });
            }
            for i in 2..j {
                edges.push(Edge { node: 2 * i, first_mode: i, last_mode: j });
            }
        }
        DimensionTree { j, nodes, edges }
    }

    fn leaf_id(j: usize, mode: usize) -> NodeId {
        if mode == 0 {
            1
        } else if mode == j {
            2 * j
        } else {
            2 * mode + 1
        }
    }

    /// Number of parametric modes `J`.
    pub fn j(&self) -> usize {
        self.j
    }

    pub fn num_modes(&self) -> usize {
        self.j + 1
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, id: NodeId) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn leaf(&self, mode: usize) -> NodeId {
        Self::leaf_id(self.j, mode)
    }

    /// Effective edges in sweep order: leaves first, then interior nodes from shallow to deep.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Non-root nodes in post-order (children before parents).
    pub fn postorder(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.nodes.len());
        fn visit(t: &DimensionTree, id: NodeId, out: &mut Vec<NodeId>) {
            if let Some([a, b]) = t.nodes[id].children {
                visit(t, a, out);
                visit(t, b, out);
            }
            out.push(id);
        }
        visit(self, 0, &mut out);
        out
    }

    /// Whether `anc` lies on the path from `id` to the root (inclusive).
    pub fn is_ancestor(&self, anc: NodeId, id: NodeId) -> bool {
        let mut cur = Some(id);
        while let Some(c) = cur {
            if c == anc {
                return true;
            }
            cur = self.nodes[c].parent;
        }
        false
    }

    /// Which child slot (0 or 1) of `parent` holds `child`.
    pub fn child_slot(&self, parent: NodeId, child: NodeId) -> usize {
        match self.nodes[parent].children {
            Some([a, _]) if a == child => 0,
            Some([_, b]) if b == child => 1,
            _ => panic!("node {child} is not a child of {parent}"),
        }
    }

    pub fn is_leaf(&self, id: NodeId) -> bool {
        self.nodes[id].children.is_none()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_counts() {
        for j in 1..8 {
            assert_eq!(DimensionTree::linear(j).num_edges(), 2 * j - 1);
        }
    }

    #[test]
    fn small_trees() {
        let t = DimensionTree::linear(1);
        assert_eq!(t.num_nodes(), 3);
        assert_eq!(t.edges().len(), 1);
        assert_eq!(t.edges()[0].node, 1);

        let t = DimensionTree::linear(2);
        let labels: Vec<_> = t.edges().iter().map(|e| e.label()).collect();
        assert_eq!(labels, ["{0}", "{1}", "{2}"]);

        let t = DimensionTree::linear(4);
        let labels: Vec<_> = t.edges().iter().map(|e| e.label()).collect();
        assert_eq!(labels, ["{0}", "{1}", "{2}", "{3}", "{4}", "{2..4}", "{3..4}"]);
        assert_eq!(t.node(2).first_mode, 1);
        assert_eq!(t.node(0).children, Some([1, 2]));
        assert_eq!(t.node(6).children, Some([7, 8]));
        assert_eq!(t.leaf(4), 8);
    }

    #[test]
    fn postorder_visits_children_first() {
        let t = DimensionTree::linear(3);
        let order = t.postorder();
        assert_eq!(order.len(), t.num_nodes());
        assert_eq!(*order.last().unwrap(), 0);
        for (pos, &id) in order.iter().enumerate() {
            if let Some(p) = t.node(id).parent {
                assert!(order.iter().position(|&x| x == p).unwrap() > pos);
            }
        }
    }
}
