//! Side-by-side tables of two runs at matched certified targets.

use super::config::{ExperimentConfig, TensorFormat};
use super::run::{run_experiment, RunSummary};
use crate::error::BenchError;
use std::io::Write;
use std::path::Path;

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonRow {
    pub target_eps: f64,
    /// `(k, ε_k, max rank, #Λ_0, Σ_{j≥1} #Λ_j, total DOFs, orthogonalization cost)` per run.
    pub a: (usize, f64, usize, usize, usize, usize, u64),
    pub b: (usize, f64, usize, usize, usize, usize, u64),
}

impl ComparisonRow {
    pub fn max_rank_delta(&self) -> i64 {
        self.b.2 as i64 - self.a.2 as i64
    }
}

/// Joins two runs on the scheduled targets: each side contributes its first iterate with
/// `ε_k ≤ target`, so the rows compare iterates at the nearest certified accuracy.
pub fn compare_runs(a: &RunSummary, b: &RunSummary) -> Result<Vec<ComparisonRow>, BenchError> {
    let mut targets: Vec<f64> = a.certified.iter().map(|c| c.0).collect();
    targets.extend(b.certified.iter().map(|c| c.0));
    targets.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    targets.dedup();
    let pick = |s: &RunSummary, t: f64, name: &str| {
        s.at_target(t)
            .map(|st| (st.k, st.eps_k, st.max_rank, st.dofs_mode0, st.dofs_parametric, st.total_dofs, st.orth_cost))
            .ok_or_else(|| BenchError::MissingRun(format!("{name} run has no iterate certifying {t:e}")))
    };
    targets.into_iter().map(|t| Ok(ComparisonRow { target_eps: t, a: pick(a, t, "first")?, b: pick(b, t, "second")? })).collect()
}

pub fn write_comparison<W: Write>(rows: &[ComparisonRow], names: [&str; 2], w: W) -> Result<(), BenchError> {
    let mut out = csv::Writer::from_writer(w);
    let cols = ["k", "eps_k", "max_rank", "dofs_mode_0", "dofs_parametric", "total_dofs", "orth_cost"];
    let mut header = vec!["target_eps".to_string()];
    for n in names {
        header.extend(cols.iter().map(|c| format!("{n}_{c}")));
    }
    header.extend(["delta_max_rank", "delta_dofs_parametric", "delta_total_dofs", "delta_orth_cost"].map(String::from));
    out.write_record(&header)?;
    for r in rows {
        let mut rec = vec![r.target_eps.to_string()];
        for s in [&r.a, &r.b] {
            rec.extend([
                s.0.to_string(),
                s.1.to_string(),
                s.2.to_string(),
                s.3.to_string(),
                s.4.to_string(),
                s.5.to_string(),
                s.6.to_string(),
            ]);
        }
        rec.push(r.max_rank_delta().to_string());
        rec.push((r.b.4 as i64 - r.a.4 as i64).to_string());
        rec.push((r.b.5 as i64 - r.a.5 as i64).to_string());
        rec.push((r.b.6 as i128 - r.a.6 as i128).to_string());
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

/// Runs the split and full formats concurrently into `<out>/split` and `<out>/full`
/// and writes `<out>/comparison.csv`. Deltas are full minus split.
pub fn compare_formats(config: &ExperimentConfig, out: &Path) -> Result<(RunSummary, RunSummary, Vec<ComparisonRow>), BenchError> {
    let variant = |f: TensorFormat| ExperimentConfig { out_dir: out.join(f.to_string()), ..config.with_format(f) };
    let (split, full) = (variant(TensorFormat::Split), variant(TensorFormat::Full));
    split.validate()?;
    full.validate()?;
    let (a, b) = std::thread::scope(|s| {
        let h = s.spawn(|| run_experiment(&full));
        let a = run_experiment(&split);
        (a, h.join().expect("full-format run panicked"))
    });
    let (a, b) = (a?, b?);
    let rows = compare_runs(&a, &b)?;
    std::fs::create_dir_all(out)?;
    write_comparison(&rows, ["split", "full"], std::fs::File::create(out.join("comparison.csv"))?)?;
    Ok((a, b, rows))
}
