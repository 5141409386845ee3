//! Single-format experiment runs and their CSV artifacts.

use super::config::ExperimentConfig;
use crate::error::BenchError;
use crate::problem::RhsSource;
use crate::solver::{adaptive_solve, AdaptiveOptions, RunTrace, SolverParams, TraceRow};
use crate::tensor::DimensionTree;
use serde::Serialize;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

/// Estimated flops of one orthogonalization sweep: a QR of every leaf frame
/// (`#Λ_j r_j²`) and of every transfer unfolding (`r_left r_right r_own²`).
pub fn orthogonalization_cost(tree: &DimensionTree, mode_lens: &[usize], node_ranks: &[usize]) -> u64 {
    let mut cost = 0u64;
    for id in 0..tree.num_nodes() {
        let own = node_ranks[id] as u64;
        match tree.node(id).children {
            Some([a, b]) => cost += node_ranks[a] as u64 * node_ranks[b] as u64 * own * own,
            None => cost += mode_lens[tree.node(id).first_mode] as u64 * own * own,
        }
    }
    cost
}

/// Per-iterate quantities shared by the artifacts and the format comparison.
#[derive(Clone, Debug, Serialize)]
pub struct IterateStats {
    pub k: usize,
    pub eps_k: f64,
    pub max_rank: usize,
    pub dofs_mode0: usize,
    /// `Σ_{j≥1} #Λ_j`.
    pub dofs_parametric: usize,
    /// Frame and transfer entries.
    pub total_dofs: usize,
    pub orth_cost: u64,
}

impl IterateStats {
    fn of(tree: &DimensionTree, r: &TraceRow) -> Self {
        IterateStats {
            k: r.k,
            eps_k: r.eps_k,
            max_rank: r.max_rank,
            dofs_mode0: r.dofs[0],
            dofs_parametric: r.dofs[1..].iter().sum(),
            total_dofs: r.entries,
            orth_cost: orthogonalization_cost(tree, &r.dofs, &r.node_ranks),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub config: ExperimentConfig,
    pub j: usize,
    pub trace: RunTrace,
    pub stats: Vec<IterateStats>,
    /// Per scheduled target, the first iterate certifying it.
    pub certified: Vec<(f64, Option<usize>)>,
    pub edge_labels: Vec<String>,
}

impl RunSummary {
    pub fn converged(&self) -> bool {
        self.trace.converged
    }

    /// Stats of the first iterate with `ε_k ≤ target`.
    pub fn at_target(&self, target: f64) -> Option<&IterateStats> {
        self.stats.iter().find(|s| s.eps_k <= target)
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, BenchError> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

/// Solves to the tightest scheduled target and writes the artifact bundle into `config.out_dir`.
///
/// The outer loop does not depend on the target except through its stopping test, so
/// every looser target is certified by a prefix of the same iterate sequence.
///
/// Files: `config.json` (resolved configuration), `trace.csv` (every outer iterate),
/// `run_log.csv` (one row per certified target), `dofs.csv`, `ops.csv` and `sv_dump.csv`
/// (edge spectra of the final iterate). All are written before an uncertified run is
/// reported as [`BenchError::NotCertified`].
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunSummary, BenchError> {
    let op = config.validate()?;
    let dir = &config.out_dir;
    std::fs::create_dir_all(dir)?;
    let mut w = create(dir, "config.json")?;
    serde_json::to_writer_pretty(&mut w, config)?;
    writeln!(w)?;
    w.flush()?;

    let j = op.j();
    let tree = op.tree();
    let schedule = config.schedule();
    let rhs: &RhsSource = &config.problem.rhs;
    let trace = match schedule.last() {
        None => RunTrace { converged: true, ..RunTrace::default() },
        Some(&eps) => {
            let params = SolverParams { eps, ..config.solver.clone() };
            adaptive_solve(&op, rhs, &params, &AdaptiveOptions::default())?.trace
        }
    };
    let stats: Vec<IterateStats> = trace.rows.iter().map(|r| IterateStats::of(&tree, r)).collect();
    let certified = schedule.iter().map(|&t| (t, stats.iter().position(|s| s.eps_k <= t))).collect();
    let summary = RunSummary {
        config: config.clone(),
        j,
        trace,
        stats,
        certified,
        edge_labels: tree.edges().iter().map(|e| e.label()).collect(),
    };
    write_artifacts(&summary, dir)?;
    if !summary.converged() {
        return Err(BenchError::NotCertified(summary.trace.failure.clone().unwrap_or_default()));
    }
    Ok(summary)
}

fn write_artifacts(s: &RunSummary, dir: &Path) -> Result<(), BenchError> {
    let j = s.j;
    s.trace.write_csv(create(dir, "trace.csv")?, j)?;

    let mut out = csv::Writer::from_writer(create(dir, "run_log.csv")?);
    let mut header: Vec<String> = ["target_eps", "k", "eps_k", "xi", "norm_r", "inner_iters"].map(String::from).to_vec();
    header.extend((0..=j).map(|m| format!("dofs_mode_{m}")));
    header.extend(["max_rank", "entries", "ranks_per_edge"].map(String::from));
    out.write_record(&header)?;
    for &(target, pos) in &s.certified {
        let Some(pos) = pos else { continue };
        let r = &s.trace.rows[pos];
        let mut rec = vec![target.to_string(), r.k.to_string(), r.eps_k.to_string(), r.xi.to_string(), r.norm_r.to_string()];
        rec.push(r.inner_iters.to_string());
        rec.extend(r.dofs.iter().map(|d| d.to_string()));
        rec.push(r.max_rank.to_string());
        rec.push(r.entries.to_string());
        rec.push(r.ranks.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";"));
        out.write_record(&rec)?;
    }
    out.flush()?;

    let mut out = csv::Writer::from_writer(create(dir, "dofs.csv")?);
    out.write_record(["k", "eps_k", "dofs_mode_0", "dofs_parametric", "total_dofs"])?;
    for st in &s.stats {
        out.write_record([
            st.k.to_string(),
            st.eps_k.to_string(),
            st.dofs_mode0.to_string(),
            st.dofs_parametric.to_string(),
            st.total_dofs.to_string(),
        ])?;
    }
    out.flush()?;

    let mut out = csv::Writer::from_writer(create(dir, "ops.csv")?);
    out.write_record(["k", "eps_k", "max_rank", "orth_cost"])?;
    for st in &s.stats {
        out.write_record([st.k.to_string(), st.eps_k.to_string(), st.max_rank.to_string(), st.orth_cost.to_string()])?;
    }
    out.flush()?;

    let mut out = csv::Writer::from_writer(create(dir, "sv_dump.csv")?);
    out.write_record(["edge", "label", "index", "sigma"])?;
    if let Some(last) = s.trace.last() {
        for (e, sigma) in last.spectra.iter().enumerate() {
            for (i, v) in sigma.iter().enumerate() {
                out.write_record([e.to_string(), s.edge_labels[e].clone(), (i + 1).to_string(), v.to_string()])?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

