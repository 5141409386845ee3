//! Order-3 transfer tensors `B[k, m, l]` (left child, right child, self).
//!
//! Storage is column-major with `k` fastest, so unfolding along index 0 and
//! along the self index are plain reshapes.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transfer {
    pub dims: [usize; 3],
    pub data: Vec<f64>,
}

/// Index slot of a transfer tensor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    Left,
    Right,
    Own,
}

impl Slot {
    pub fn child(slot: usize) -> Slot {
        if slot == 0 {
            Slot::Left
        } else {
            Slot::Right
        }
    }

    fn pos(self) -> usize {
        match self {
            Slot::Left => 0,
            Slot::Right => 1,
            Slot::Own => 2,
        }
    }
}

impl Transfer {
    pub fn zeros(dims: [usize; 3]) -> Self {
        Transfer { dims, data: vec![0.0; dims[0] * dims[1] * dims[2]] }
    }

    #[inline]
    fn offset(&self, k: usize, m: usize, l: usize) -> usize {
        k + self.dims[0] * (m + self.dims[1] * l)
    }

    #[inline]
    pub fn get(&self, k: usize, m: usize, l: usize) -> f64 {
        self.data[self.offset(k, m, l)]
    }

    #[inline]
    pub fn set(&mut self, k: usize, m: usize, l: usize, v: f64) {
        let o = self.offset(k, m, l);
        self.data[o] = v;
    }

    pub fn dim(&self, slot: Slot) -> usize {
        self.dims[slot.pos()]
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// `(r_left*r_right) x r_own` matrix; rows indexed by `k + r_left*m`.
    pub fn as_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_column_slice(self.dims[0] * self.dims[1], self.dims[2], &self.data)
    }

    pub fn from_matrix(r_left: usize, r_right: usize, m: &DMatrix<f64>) -> Self {
        assert_eq!(m.nrows(), r_left * r_right);
        Transfer { dims: [r_left, r_right, m.ncols()], data: m.as_slice().to_vec() }
    }

    /// Matrix with the given slot as rows and the other two indices as columns.
    pub fn unfold(&self, slot: Slot) -> DMatrix<f64> {
        let [a, b, c] = self.dims;
        match slot {
            Slot::Left => DMatrix::from_column_slice(a, b * c, &self.data),
            Slot::Own => self.as_matrix().transpose(),
            Slot::Right => {
                let mut out = DMatrix::zeros(b, a * c);
                for l in 0..c {
                    for m in 0..b {
                        for k in 0..a {
                            out[(m, k + a * l)] = self.get(k, m, l);
                        }
                    }
                }
                out
            }
        }
    }

    /// Inverse of [`Transfer::unfold`]; `other` holds the two remaining dims in order.
    pub fn fold(slot: Slot, mat: &DMatrix<f64>, other: [usize; 2]) -> Self {
        let d = mat.nrows();
        match slot {
            Slot::Left => {
                assert_eq!(mat.ncols(), other[0] * other[1]);
                Transfer { dims: [d, other[0], other[1]], data: mat.as_slice().to_vec() }
            }
            Slot::Own => Transfer::from_matrix(other[0], other[1], &mat.transpose()),
            Slot::Right => {
                let (a, c) = (other[0], other[1]);
                assert_eq!(mat.ncols(), a * c);
                let mut t = Transfer::zeros([a, d, c]);
                for l in 0..c {
                    for m in 0..d {
                        for k in 0..a {
                            t.set(k, m, l, mat[(m, k + a * l)]);
                        }
                    }
                }
                t
            }
        }
    }

    fn others(&self, slot: Slot) -> [usize; 2] {
        let [a, b, c] = self.dims;
        match slot {
            Slot::Left => [b, c],
            Slot::Right => [a, c],
            Slot::Own => [a, b],
        }
    }

    /// Mode product along `slot`: the index is replaced via `new[i'] = sum_i x[i', i] old[i]`.
    pub fn mode_product(&self, slot: Slot, x: &DMatrix<f64>) -> Self {
        assert_eq!(x.ncols(), self.dim(slot), "mode product dimension mismatch");
        match slot {
            Slot::Own => {
                let m = self.as_matrix() * x.transpose();
                Transfer::from_matrix(self.dims[0], self.dims[1], &m)
            }
            _ => {
                let others = self.others(slot);
                Transfer::fold(slot, &(x * self.unfold(slot)), others)
            }
        }
    }
}
