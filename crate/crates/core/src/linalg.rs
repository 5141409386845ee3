//! Small dense helpers on nalgebra matrices (factorizations via faer): thin QR and sorted
//! SVD that tolerate empty shapes.

use nalgebra::DMatrix;

/// Relative cutoff below which singular values count as zero.
pub const RANK_CUTOFF: f64 = 1e-14;

/// Thin QR: `m = q * r` with `q` of size `rows x min(rows, cols)`.
pub fn qr_thin(m: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        let k = rows.min(cols);
        return (DMatrix::zeros(rows, k), DMatrix::zeros(k, cols));
    }
    let fm = faer::MatRef::from_column_major_slice(m.as_slice(), rows, cols);
    let qr = fm.qr();
    let (q, r) = (qr.compute_thin_Q(), qr.thin_R());
    let k = rows.min(cols);
    (DMatrix::from_fn(rows, k, |i, j| q[(i, j)]), DMatrix::from_fn(k, cols, |i, j| r[(i, j)]))
}

/// Thin SVD with singular values sorted in decreasing order.
pub struct Svd {
    pub u: DMatrix<f64>,
    pub s: Vec<f64>,
    pub vt: DMatrix<f64>,
}

pub fn svd(m: &DMatrix<f64>) -> Svd {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    if k == 0 {
        return Svd { u: DMatrix::zeros(rows, 0), s: vec![], vt: DMatrix::zeros(0, cols) };
    }
    let fm = faer::Mat::<f64>::from_fn(rows, cols, |i, j| m[(i, j)]);
    let d = fm.thin_svd().expect("svd did not converge");
    let (fu, fs, fv) = (d.U(), d.S(), d.V());
    let u = DMatrix::from_fn(rows, k, |i, j| fu[(i, j)]);
    let vt = DMatrix::from_fn(k, cols, |i, j| fv[(j, i)]);
    let sv = fs.column_vector();
    let s: Vec<f64> = (0..k).map(|i| sv[i]).collect();
    sort_svd(u, s, vt)
}

fn sort_svd(u: DMatrix<f64>, s: Vec<f64>, vt: DMatrix<f64>) -> Svd {
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].partial_cmp(&s[a]).unwrap_or(std::cmp::Ordering::Equal));
    if order.iter().enumerate().all(|(i, &o)| i == o) {
        return Svd { u, s, vt };
    }
    let u2 = DMatrix::from_fn(u.nrows(), order.len(), |i, j| u[(i, order[j])]);
    let vt2 = DMatrix::from_fn(order.len(), vt.ncols(), |i, j| vt[(order[i], j)]);
    let s2 = order.iter().map(|&o| s[o]).collect();
    Svd { u: u2, s: s2, vt: vt2 }
}

pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    svd(m).s
}

/// Number of singular values above `RANK_CUTOFF * s[0]` (input sorted decreasingly).
pub fn numerical_rank(s: &[f64]) -> usize {
    match s.first() {
        Some(&s0) if s0 > 0.0 => s.iter().take_while(|&&x| x > RANK_CUTOFF * s0).count(),
        _ => 0,
    }
}

/// Column-selects the first `k` columns.
pub fn leading_columns(m: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    m.columns(0, k).into_owned()
}
