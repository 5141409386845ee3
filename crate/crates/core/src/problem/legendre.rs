//! Legendre polynomials orthonormal for the uniform probability measure on [-1, 1].

use nalgebra::DMatrix;

/// Recurrence coefficient `β_i = 1/(4 − i^{-2})`.
pub fn beta(i: u32) -> f64 {
    let i = i as f64;
    1.0 / (4.0 - 1.0 / (i * i))
}

/// `∫ y L_m(y) L_n(y) dσ(y)`: `√β_{max(m,n)}` for `|m − n| = 1`, else 0.
pub fn coupling(m: u32, n: u32) -> f64 {
    if n == m + 1 {
        beta(n).sqrt()
    } else if m == n + 1 {
        beta(m).sqrt()
    } else {
        0.0
    }
}

/// Coupling block `N[rows, cols]` over sorted degree lists.
pub fn coupling_matrix(rows: &[u32], cols: &[u32]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| coupling(rows[i], cols[j]))
}

/// `L_n(y)` with `L_0 = 1` via `y L_n = √β_{n+1} L_{n+1} + √β_n L_{n−1}`.
pub fn eval(n: u32, y: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let next = (y * cur - if k > 0 { beta(k).sqrt() * prev } else { 0.0 }) / beta(k + 1).sqrt();
        prev = cur;
        cur = next;
    }
    cur
}
