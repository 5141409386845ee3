//! Per-iteration records of the outer loop and their CSV/JSON forms.

use serde::Serialize;
use std::io::Write;

#[derive(Clone, Debug, Serialize)]
pub struct TraceRow {
    pub k: usize,
    /// `ε_k = ‖r_k‖ + ξ`.
    pub eps_k: f64,
    pub xi: f64,
    pub norm_r: f64,
    /// Inner iterations of the solve that produced `u_k` (0 for `k = 0`).
    pub inner_iters: usize,
    /// `#Λ^k_j` for `j = 0..=J`.
    pub dofs: Vec<usize>,
    /// Ranks of `u_k` on every effective edge, in sweep order.
    pub ranks: Vec<usize>,
    pub max_rank: usize,
    /// Representation rank of every tree node (the root has rank 1).
    pub node_ranks: Vec<usize>,
    /// Frame and transfer entries of `u_k`.
    pub entries: usize,
    pub spectra: Vec<Vec<f64>>,
    pub level_cutoff: u8,
    pub window: u8,
    pub rhs_level: u8,
    /// `#Λ̃^k_j`.
    pub tilde_dofs: Vec<usize>,
    #[serde(skip)]
    pub wall_time: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct RunTrace {
    pub rows: Vec<TraceRow>,
    pub converged: bool,
    pub failure: Option<String>,
}

impl RunTrace {
    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }

    /// One row per outer iteration; no timing columns, so reruns are byte-identical.
    pub fn write_csv<W: Write>(&self, w: W, j: usize) -> Result<(), csv::Error> {
        let mut out = csv::Writer::from_writer(w);
        let mut header: Vec<String> = ["k", "eps_k", "xi", "norm_r", "inner_iters"].iter().map(|s| s.to_string()).collect();
        header.extend((0..=j).map(|m| format!("dofs_mode_{m}")));
        header.push("max_rank".into());
        header.push("ranks_per_edge".into());
        out.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![r.k.to_string(), r.eps_k.to_string(), r.xi.to_string(), r.norm_r.to_string(), r.inner_iters.to_string()];
            rec.extend(r.dofs.iter().map(|d| d.to_string()));
            rec.push(r.max_rank.to_string());
            rec.push(r.ranks.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";"));
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, w: W) -> serde_json::Result<()> {
        serde_json::to_writer_pretty(w, self)
    }
}
