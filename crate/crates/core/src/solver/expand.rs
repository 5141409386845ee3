//! Contraction-based enlargement of the product index set (bulk chasing).

use crate::error::SolverError;
use crate::problem::{IndexSet, SolutionTensor};
use crate::tensor::index_set::positions_in;
use crate::tensor::ProductIndexSet;

/// Relative slack for the runtime bulk-condition check.
const BULK_SLACK: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct ExpandResult {
    pub set: IndexSet,
    /// Number of candidates `M` taken in the contraction-sorted pass.
    pub m: usize,
    /// Whether the sparse-mode pass (all parametric candidates, `K` sparse ones) was used.
    pub fallback: bool,
    pub k: usize,
}

/// A candidate new index: mode and position in `Λ̃_mode`, with its contraction value.
#[derive(Clone, Copy, Debug)]
struct Candidate {
    mode: usize,
    pos: usize,
    pi: f64,
}

/// Contractions of `r` on the rows of `tilde` (zero where `r` has no support).
fn contractions_on(r: &SolutionTensor, tilde: &IndexSet) -> Vec<Vec<f64>> {
    let pi = r.contractions();
    let sup = r.support();
    (0..=tilde.j())
        .map(|m| {
            let pos = if m == 0 {
                positions_in(&tilde.mode0, &sup.mode0)
            } else {
                positions_in(&tilde.modes[m - 1], &sup.modes[m - 1])
            };
            pos.iter().map(|p| p.map_or(0.0, |i| pi[m][i])).collect()
        })
        .collect()
}

/// `Expand(r, Λ, Λ̃, α)`: returns `Λ ⊆ Λ̄ ⊆ Λ̃` with `‖R_Λ̄ r‖ ≥ α‖r‖`.
pub fn expand(r: &SolutionTensor, lambda: &IndexSet, tilde: &IndexSet, alpha: f64) -> Result<ExpandResult, SolverError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(SolverError::Inadmissible(format!("alpha = {alpha} outside (0, 1)")));
    }
    if !lambda.is_subset(tilde) || !r.support().is_subset(tilde) {
        return Err(SolverError::Postcondition("expand needs Λ ⊆ Λ̃ and supp r ⊆ Λ̃".into()));
    }
    let rnorm = r.norm();
    if rnorm == 0.0 {
        return Err(SolverError::ZeroResidual);
    }
    let target = alpha * alpha * rnorm * rnorm;
    let pi = contractions_on(r, tilde);
    let inside = |m: usize| -> Vec<bool> {
        if m == 0 {
            tilde.mode0.iter().map(|x| lambda.contains0(x)).collect()
        } else {
            tilde.modes[m - 1].iter().map(|&d| lambda.contains_mode(m, d)).collect()
        }
    };
    let masks: Vec<Vec<bool>> = (0..=tilde.j()).map(inside).collect();

    let mut cands: Vec<Candidate> = Vec::new();
    for (m, mask) in masks.iter().enumerate() {
        for (pos, &old) in mask.iter().enumerate() {
            if !old {
                cands.push(Candidate { mode: m, pos, pi: pi[m][pos] });
            }
        }
    }
    cands.sort_by(|a, b| b.pi.partial_cmp(&a.pi).unwrap().then(a.mode.cmp(&b.mode)).then(a.pos.cmp(&b.pos)));

    let r_old = r.restrict(lambda).norm();
    let mut acc = r_old * r_old;
    let mut m = 0;
    while m < cands.len() && acc < target {
        acc += cands[m].pi * cands[m].pi;
        m += 1;
    }
    let mut chosen = masks.clone();
    for c in &cands[..m] {
        chosen[c.mode][c.pos] = true;
    }
    let set_min = select(tilde, &chosen);
    let kept = r.restrict(&set_min).norm();
    if kept >= alpha * rnorm {
        let out = ExpandResult { set: set_min, m, fallback: false, k: 0 };
        check(&out.set, r, lambda, tilde, alpha, rnorm)?;
        return Ok(out);
    }

    let mut chosen: Vec<Vec<bool>> = masks.clone();
    for c in chosen.iter_mut().skip(1) {
        c.iter_mut().for_each(|x| *x = true);
    }
    let mut acc: f64 = masks[0].iter().zip(&pi[0]).filter(|(o, _)| **o).map(|(_, p)| p * p).sum();
    let mut k = 0;
    let sparse: Vec<&Candidate> = cands.iter().filter(|c| c.mode == 0).collect();
    while k < sparse.len() && acc < target {
        acc += sparse[k].pi * sparse[k].pi;
        chosen[0][sparse[k].pos] = true;
        k += 1;
    }
    let out = ExpandResult { set: select(tilde, &chosen), m, fallback: true, k };
    check(&out.set, r, lambda, tilde, alpha, rnorm)?;
    Ok(out)
}

fn select(tilde: &IndexSet, chosen: &[Vec<bool>]) -> IndexSet {
    let mode0 = tilde.mode0.iter().zip(&chosen[0]).filter(|(_, &c)| c).map(|(x, _)| x.clone()).collect();
    let modes = tilde
        .modes
        .iter()
        .zip(&chosen[1..])
        .map(|(v, c)| v.iter().zip(c).filter(|(_, &c)| c).map(|(&d, _)| d).collect())
        .collect();
    ProductIndexSet::new(mode0, modes)
}

fn check(set: &IndexSet, r: &SolutionTensor, lambda: &IndexSet, tilde: &IndexSet, alpha: f64, rnorm: f64) -> Result<(), SolverError> {
    if !lambda.is_subset(set) || !set.is_subset(tilde) {
        return Err(SolverError::Postcondition("expand result not nested between Λ and Λ̃".into()));
    }
    let kept = r.restrict(set).norm();
    if kept < alpha * rnorm * (1.0 - BULK_SLACK) {
        return Err(SolverError::Postcondition(format!("bulk condition failed: {kept:.6e} < {alpha} * {rnorm:.6e}")));
    }
    Ok(())
}
