//! Soft-thresholded Richardson iteration for the Galerkin system on a fixed product set.

use super::params::SolverParams;
use crate::error::SolverError;
use crate::problem::{IndexSet, OperatorBlock, ParametricOperator, SolutionTensor};
use crate::tensor::HTensor;

/// Test hooks and diagnostics for [`st_solve`].
#[derive(Clone, Debug, Default)]
pub struct StSolveOptions {
    /// Keeps `τ` fixed at this value instead of the adaptive update.
    pub frozen_tau: Option<f64>,
    /// Stores every iterate `w_i` in the result.
    pub record_iterates: bool,
}

#[derive(Clone, Debug)]
pub struct StSolveResult {
    pub w: SolutionTensor,
    pub iterations: usize,
    /// Residual norms `‖s_i‖`, `i = 0..=I`.
    pub residuals: Vec<f64>,
    pub taus: Vec<f64>,
    pub iterates: Vec<SolutionTensor>,
}

/// Solves `A_Λ w = f_Λ` to residual `eps` with `w_{i+1} = ST_τ(w_i − ω s_i)`.
///
/// `f` must be supported in `lambda`; the residual is evaluated exactly on `lambda`.
pub fn st_solve(
    op: &ParametricOperator,
    f: &SolutionTensor,
    lambda: &IndexSet,
    eps: f64,
    params: &SolverParams,
    opts: &StSolveOptions,
) -> Result<StSolveResult, SolverError> {
    if !(eps > 0.0) {
        return Err(SolverError::Inadmissible(format!("target residual {eps} must be positive")));
    }
    if !f.support().is_subset(lambda) {
        return Err(SolverError::Postcondition("right-hand side not supported in the Galerkin set".into()));
    }
    let block = op.galerkin_block(lambda, None);
    let f = f.embed(lambda);
    let b = op.bounds();
    let fnorm = f.norm();
    let edges = op.tree().num_edges() as f64;
    let tau_min = b.omega * fnorm / edges;
    let mut tau = match (opts.frozen_tau, params.tau0) {
        (Some(t), _) => t,
        (None, Some(t)) if t < tau_min => {
            return Err(SolverError::Inadmissible(format!("tau0 = {t} below omega*||f||/E = {tau_min}")));
        }
        (None, Some(t)) => t,
        (None, None) => tau_min,
    };
    let control = (1.0 - b.rho) * params.nu_st / (b.big_gamma * b.rho);

    let mut w: SolutionTensor = HTensor::zero(op.tree(), lambda.clone());
    let mut s = residual(&block, &w, &f)?;
    let mut snorm = s.norm();
    let mut out = StSolveResult { w: w.clone(), iterations: 0, residuals: vec![snorm], taus: vec![], iterates: vec![] };
    if opts.record_iterates {
        out.iterates.push(w.clone());
    }
    let mut i = 0;
    while snorm > eps {
        if i >= params.inner_cap {
            return Err(SolverError::IterationCap { cap: params.inner_cap, last: snorm });
        }
        let next = w.sub(&s.scale(b.omega))?.soft_threshold(tau);
        let s_next = residual(&block, &next, &f)?;
        let s_next_norm = s_next.norm();
        let step = next.sub(&w)?.norm();
        out.taus.push(tau);
        if opts.frozen_tau.is_none() && step <= control * s_next_norm {
            tau *= params.theta_st;
        }
        w = next;
        s = s_next;
        snorm = s_next_norm;
        i += 1;
        out.residuals.push(snorm);
        if opts.record_iterates {
            out.iterates.push(w.clone());
        }
    }
    out.w = w;
    out.iterations = i;
    Ok(out)
}

/// Iterates `w ← ST_τ(w − ω(A_Λ w − f_Λ))` with fixed `τ` until the step falls below `tol`.
pub fn st_fixed_point(
    op: &ParametricOperator,
    f: &SolutionTensor,
    lambda: &IndexSet,
    tau: f64,
    tol: f64,
    cap: usize,
) -> Result<(SolutionTensor, usize), SolverError> {
    let block = op.galerkin_block(lambda, None);
    let f = f.embed(lambda);
    let omega = op.bounds().omega;
    let mut w: SolutionTensor = HTensor::zero(op.tree(), lambda.clone());
    for i in 0..cap {
        let s = residual(&block, &w, &f)?;
        let next = w.sub(&s.scale(omega))?.soft_threshold(tau);
        let step = next.sub(&w)?.norm();
        w = next;
        if step <= tol {
            return Ok((w, i + 1));
        }
    }
    Err(SolverError::IterationCap { cap, last: f64::NAN })
}

/// `A_Λ w − f_Λ`, recompressed.
pub fn residual(block: &OperatorBlock, w: &SolutionTensor, f: &SolutionTensor) -> Result<SolutionTensor, SolverError> {
    Ok(block.apply(w)?.sub(f)?.recompress())
}
