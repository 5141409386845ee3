//! Dense reference implementations of the tensor operations.

use crate::tensor::DenseTensor;
use nalgebra::{DMatrix, DVector};

/// Row-mode sets of the effective edges for `J` parametric modes, in sweep order.
pub fn edge_mode_sets(j: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![0]];
    if j >= 2 {
        for m in 1..=j {
            out.push(vec![m]);
        }
        for i in 2..j {
            out.push((i..=j).collect());
        }
    }
    out
}

fn full_svd(m: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let (r, c) = m.shape();
    let k = r.min(c);
    let fm = faer::Mat::<f64>::from_fn(r, c, |i, j| m[(i, j)]);
    let d = fm.thin_svd().expect("svd");
    let (fu, fs, fv) = (d.U(), d.S().column_vector(), d.V());
    let mut idx: Vec<usize> = (0..k).collect();
    idx.sort_by(|&a, &b| fs[b].partial_cmp(&fs[a]).unwrap());
    let u = DMatrix::from_fn(r, k, |i, j| fu[(i, idx[j])]);
    let vt = DMatrix::from_fn(k, c, |i, j| fv[(j, idx[i])]);
    (u, idx.iter().map(|&i| fs[i]).collect(), vt)
}

/// Singular values of every edge matricization (values below 1e-14·σ_max removed).
pub fn dense_edge_spectra(t: &DenseTensor) -> Vec<Vec<f64>> {
    let j = t.shape.len() - 1;
    edge_mode_sets(j)
        .iter()
        .map(|rows| {
            let m = t.matricize(rows);
            if m.is_empty() {
                return vec![];
            }
            let (_, s, _) = full_svd(&m);
            let s0 = s.first().copied().unwrap_or(0.0);
            s.into_iter().filter(|&x| s0 > 0.0 && x > 1e-14 * s0).collect()
        })
        .collect()
}

/// Sequential edge-wise soft thresholding on the dense array.
pub fn dense_soft_threshold(t: &DenseTensor, tau: f64) -> DenseTensor {
    let j = t.shape.len() - 1;
    let mut cur = t.clone();
    for rows in edge_mode_sets(j) {
        let m = cur.matricize(&rows);
        if m.is_empty() {
            continue;
        }
        let (u, s, vt) = full_svd(&m);
        let s0 = s.first().copied().unwrap_or(0.0);
        let shrunk: Vec<f64> = s.iter().map(|&x| if x > 1e-14 * s0 { (x - tau).max(0.0) } else { 0.0 }).collect();
        let m2 = &u * DMatrix::from_diagonal(&DVector::from_vec(shrunk)) * &vt;
        cur = DenseTensor::from_matricization(&t.shape, &rows, &m2).unwrap();
    }
    cur
}

/// Mode contractions by direct summation: `π^(j)_ν = (Σ_{other indices} |t|²)^{1/2}`.
pub fn dense_contractions(t: &DenseTensor) -> Vec<Vec<f64>> {
    let strides = t.strides();
    let mut out: Vec<Vec<f64>> = t.shape.iter().map(|&n| vec![0.0; n]).collect();
    for (off, &v) in t.data.iter().enumerate() {
        for (m, acc) in out.iter_mut().enumerate() {
            let i = (off / strides[m]) % t.shape[m];
            acc[i] += v * v;
        }
    }
    for acc in &mut out {
        for x in acc.iter_mut() {
            *x = x.sqrt();
        }
    }
    out
}

/// Restriction of a dense array to a mask per mode (entries outside are zeroed).
pub fn dense_restrict(t: &DenseTensor, keep: &[Vec<bool>]) -> DenseTensor {
    let strides = t.strides();
    let mut out = t.clone();
    for (off, v) in out.data.iter_mut().enumerate() {
        let inside = (0..t.shape.len()).all(|m| keep[m][(off / strides[m]) % t.shape[m]]);
        if !inside {
            *v = 0.0;
        }
    }
    out
}
