//! Log-log rate fits over run artifacts.

use crate::error::BenchError;
use std::path::Path;

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> Result<f64, BenchError> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(BenchError::DegenerateWindow(format!("{} points (need at least 3)", x.len().min(y.len()))));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    if !(sxx > 1e-300) {
        return Err(BenchError::DegenerateWindow("all x values coincide".into()));
    }
    Ok(sxy / sxx)
}

/// Reads columns `x_col`, `y_col` from a CSV with a header row. Rows with a non-positive
/// entry are dropped.
pub fn read_columns(csv_path: &Path, x_col: &str, y_col: &str) -> Result<(Vec<f64>, Vec<f64>), BenchError> {
    let mut rd = csv::Reader::from_path(csv_path)?;
    let header = rd.headers()?.clone();
    let col = |name: &str| {
        header.iter().position(|h| h == name).ok_or_else(|| BenchError::Config(format!("no column {name:?} in {}", csv_path.display())))
    };
    let (ix, iy) = (col(x_col)?, col(y_col)?);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for rec in rd.records() {
        let rec = rec?;
        let num = |i: usize| -> Result<f64, BenchError> {
            rec.get(i).unwrap_or("").trim().parse().map_err(|e| BenchError::Config(format!("bad number in column {i}: {e}")))
        };
        let (x, y) = (num(ix)?, num(iy)?);
        if x > 0.0 && y > 0.0 {
            xs.push(x);
            ys.push(y);
        }
    }
    Ok((xs, ys))
}

/// Slope of `ln y` vs `ln x` over the last `window` rows of the CSV.
pub fn fit_rate(csv_path: &Path, x_col: &str, y_col: &str, window: usize) -> Result<f64, BenchError> {
    let (xs, ys) = read_columns(csv_path, x_col, y_col)?;
    if window < 3 || xs.len() < window {
        return Err(BenchError::DegenerateWindow(format!("window {window} over {} usable rows", xs.len())));
    }
    let from = xs.len() - window;
    fit_slope(&xs[from..], &ys[from..])
}
