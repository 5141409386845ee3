//! The outer adaptive loop: residual approximation, expansion and thresholded Galerkin solves.

use super::expand::expand;
use super::params::SolverParams;
use super::residual::{res_approx, ResidualApprox};
use super::st_solve::{st_solve, StSolveOptions};
use super::trace::{RunTrace, TraceRow};
use crate::error::SolverError;
use crate::problem::{assemble_rhs, IndexSet, ParametricOperator, RhsSource, SolutionTensor};
use crate::tensor::{HTensor, ProductIndexSet};
use std::time::Instant;

#[derive(Clone, Debug, Default)]
pub struct AdaptiveOptions {
    /// Keeps `(Λ^k, u_k)` for every outer step.
    pub keep_iterates: bool,
}

#[derive(Clone, Debug)]
pub struct AdaptiveOutcome {
    pub u: SolutionTensor,
    pub lambda: IndexSet,
    pub trace: RunTrace,
    /// The last residual approximation, certifying `‖A u − f‖ ≤ ‖r‖ + ξ`.
    pub residual: Option<ResidualApprox>,
    pub iterates: Vec<(IndexSet, SolutionTensor)>,
}

impl AdaptiveOutcome {
    pub fn converged(&self) -> bool {
        self.trace.converged
    }
}

/// `f_Λ`: the right-hand side restricted to `Λ`.
pub fn rhs_on(op: &ParametricOperator, rhs: &RhsSource, lambda: &IndexSet) -> SolutionTensor {
    let level = lambda.mode0.iter().filter(|x| x.nu.is_zero()).map(|x| x.lambda.level).max().unwrap_or(0);
    assemble_rhs(op, rhs, level).restrict(lambda).embed(lambda)
}

/// `r = ResApprox(u, ξ)` with `ξ` halved until `ξ ≤ δ‖r‖`, evaluated once before the guard.
fn refine_residual(
    op: &ParametricOperator,
    rhs: &RhsSource,
    u: &SolutionTensor,
    lambda: &IndexSet,
    mut xi: f64,
    delta: f64,
) -> Result<ResidualApprox, SolverError> {
    let mut r = res_approx(op, rhs, u, lambda, xi)?;
    while xi > delta * r.norm {
        xi *= 0.5;
        r = res_approx(op, rhs, u, lambda, xi)?;
    }
    Ok(r)
}

fn row(k: usize, u: &SolutionTensor, lambda: &IndexSet, r: &ResidualApprox, inner: usize, t0: Instant) -> TraceRow {
    let spectra = u.edge_singular_values();
    let ranks: Vec<usize> = spectra.iter().map(|s| s.len()).collect();
    TraceRow {
        k,
        eps_k: r.norm + r.xi,
        xi: r.xi,
        norm_r: r.norm,
        inner_iters: inner,
        dofs: lambda.mode_lens(),
        max_rank: ranks.iter().copied().max().unwrap_or(0),
        ranks,
        node_ranks: (0..u.tree().num_nodes()).map(|id| u.node_data(id).rank()).collect(),
        entries: u.num_entries(),
        spectra,
        level_cutoff: r.level_cutoff,
        window: r.window,
        rhs_level: r.rhs_level,
        tilde_dofs: r.rows.mode_lens(),
        wall_time: t0.elapsed().as_secs_f64(),
    }
}

/// Runs the adaptive method until the certified bound `‖r_k‖ + ξ ≤ ε` holds.
///
/// Hitting an iteration cap returns the partial trace with `converged = false`.
pub fn adaptive_solve(
    op: &ParametricOperator,
    rhs: &RhsSource,
    params: &SolverParams,
    opts: &AdaptiveOptions,
) -> Result<AdaptiveOutcome, SolverError> {
    params.validate(&op.bounds())?;
    let t0 = Instant::now();
    let j = op.j();
    let mut lambda: IndexSet = ProductIndexSet::empty(j);
    let mut u: SolutionTensor = HTensor::zero(op.tree(), lambda.clone());
    let mut out =
        AdaptiveOutcome { u: u.clone(), lambda: lambda.clone(), trace: RunTrace::default(), residual: None, iterates: vec![] };
    let fnorm = rhs.norm();
    if fnorm <= params.eps {
        out.trace.converged = true;
        return Ok(out);
    }

    let mut r = refine_residual(op, rhs, &u, &lambda, params.theta_outer * fnorm, params.delta)?;
    let mut inner = 0;
    let mut k = 0;
    loop {
        let tr = row(k, &u, &lambda, &r, inner, t0);
        log::debug!(
            "k={k} eps_k={:.3e} xi={:.2e} dofs={:?} max_rank={} L={} window={} rhs_level={} t={:.1}s",
            tr.eps_k, tr.xi, tr.dofs, tr.max_rank, tr.level_cutoff, tr.window, tr.rhs_level, tr.wall_time
        );
        out.trace.rows.push(tr);
        if opts.keep_iterates {
            out.iterates.push((lambda.clone(), u.clone()));
        }
        let eps_k = r.norm + r.xi;
        if eps_k <= params.eps {
            out.trace.converged = true;
            break;
        }
        if k >= params.outer_cap {
            out.trace.failure = Some(format!("outer iteration cap {} reached at eps_k = {eps_k:.3e}", params.outer_cap));
            break;
        }
        let next = expand(&r.r, &lambda, &r.rows, params.alpha)?;
        lambda = next.set;
        let f_lambda = rhs_on(op, rhs, &lambda);
        let solved = match st_solve(op, &f_lambda, &lambda, params.eta * r.norm, params, &StSolveOptions::default()) {
            Ok(s) => s,
            Err(SolverError::IterationCap { cap, last }) => {
                out.trace.failure = Some(format!("inner iteration cap {cap} reached (residual {last:.3e})"));
                break;
            }
            Err(e) => return Err(e),
        };
        u = solved.w;
        inner = solved.iterations;
        r = refine_residual(op, rhs, &u, &lambda, params.theta_outer * eps_k, params.delta)?;
        k += 1;
    }
    out.u = u;
    out.lambda = lambda;
    out.residual = Some(r);
    Ok(out)
}
