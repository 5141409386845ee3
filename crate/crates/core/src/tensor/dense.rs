//! Row-major dense tensors, used for small-case conversions and by the oracles.

use crate::error::TensorError;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Largest dense tensor that conversions will build.
pub const DENSE_CAP: usize = 10_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseTensor {
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
}

impl DenseTensor {
    pub fn zeros(shape: Vec<usize>) -> Result<Self, TensorError> {
        let n = checked_size(&shape)?;
        Ok(DenseTensor { shape, data: vec![0.0; n] })
    }

    pub fn from_vec(shape: Vec<usize>, data: Vec<f64>) -> Result<Self, TensorError> {
        let n = checked_size(&shape)?;
        if n != data.len() {
            return Err(TensorError::Shape(format!("shape {:?} needs {} entries, got {}", shape, n, data.len())));
        }
        Ok(DenseTensor { shape, data })
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn strides(&self) -> Vec<usize> {
        strides(&self.shape)
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        idx.iter().zip(self.strides()).map(|(i, s)| i * s).sum()
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn sub(&self, other: &DenseTensor) -> DenseTensor {
        assert_eq!(self.shape, other.shape);
        DenseTensor {
            shape: self.shape.clone(),
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// Matricization with the listed modes (in order) as row modes.
    pub fn matricize(&self, row_modes: &[usize]) -> DMatrix<f64> {
        let col_modes: Vec<usize> = (0..self.shape.len()).filter(|m| !row_modes.contains(m)).collect();
        let rdims: Vec<usize> = row_modes.iter().map(|&m| self.shape[m]).collect();
        let cdims: Vec<usize> = col_modes.iter().map(|&m| self.shape[m]).collect();
        let nr: usize = rdims.iter().product();
        let nc: usize = cdims.iter().product();
        let st = self.strides();
        let mut out = DMatrix::zeros(nr, nc);
        let rs = strides(&rdims);
        let cs = strides(&cdims);
        for r in 0..nr {
            let mut base = 0;
            for (a, &m) in row_modes.iter().enumerate() {
                base += ((r / rs[a]) % rdims[a]) * st[m];
            }
            for c in 0..nc {
                let mut off = base;
                for (b, &m) in col_modes.iter().enumerate() {
                    off += ((c / cs[b]) % cdims[b]) * st[m];
                }
                out[(r, c)] = self.data[off];
            }
        }
        out
    }

    /// Inverse of [`DenseTensor::matricize`].
    pub fn from_matricization(shape: &[usize], row_modes: &[usize], m: &DMatrix<f64>) -> Result<Self, TensorError> {
        let mut t = DenseTensor::zeros(shape.to_vec())?;
        let col_modes: Vec<usize> = (0..shape.len()).filter(|x| !row_modes.contains(x)).collect();
        let rdims: Vec<usize> = row_modes.iter().map(|&x| shape[x]).collect();
        let cdims: Vec<usize> = col_modes.iter().map(|&x| shape[x]).collect();
        let st = t.strides();
        let rs = strides(&rdims);
        let cs = strides(&cdims);
        for r in 0..m.nrows() {
            let mut base = 0;
            for (a, &x) in row_modes.iter().enumerate() {
                base += ((r / rs[a]) % rdims[a]) * st[x];
            }
            for c in 0..m.ncols() {
                let mut off = base;
                for (b, &x) in col_modes.iter().enumerate() {
                    off += ((c / cs[b]) % cdims[b]) * st[x];
                }
                t.data[off] = m[(r, c)];
            }
        }
        Ok(t)
    }
}

pub fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for i in (0..shape.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * shape[i + 1];
    }
    s
}

fn checked_size(shape: &[usize]) -> Result<usize, TensorError> {
    let mut n: usize = 1;
    for &d in shape {
        n = n.checked_mul(d).filter(|&v| v <= DENSE_CAP).ok_or_else(|| {
            TensorError::TooLarge(format!("dense tensor of shape {shape:?} exceeds {DENSE_CAP} entries"))
        })?;
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matricize_roundtrip() {
        let shape = vec![2, 3, 4];
        let t = DenseTensor::from_vec(shape.clone(), (0..24).map(|x| x as f64).collect()).unwrap();
        for rows in [vec![0], vec![1], vec![2], vec![1, 2]] {
            let m = t.matricize(&rows);
            let back = DenseTensor::from_matricization(&shape, &rows, &m).unwrap();
            assert_eq!(back, t);
        }
        let m = t.matricize(&[1]);
        assert_eq!(m[(2, 0)], t.get(&[0, 2, 0]));
        assert_eq!(m[(2, 5)], t.get(&[1, 2, 1]));
    }

    #[test]
    fn cap_enforced() {
        assert!(DenseTensor::zeros(vec![10_000, 10_000]).is_err());
    }
}
