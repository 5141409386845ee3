//! Certified residual approximation on an enlarged product set.

use crate::error::SolverError;
use crate::problem::operator::SpatialWindow;
use crate::problem::{assemble_rhs, IndexSet, ParametricOperator, RhsSource, SolutionTensor};

/// `r ≈ A w − f` supported on `rows`, with `‖r − (A w − f)‖ ≤ bound ≤ ξ`.
#[derive(Clone, Debug)]
pub struct ResidualApprox {
    pub r: SolutionTensor,
    pub norm: f64,
    /// The enlarged set `Λ̃`.
    pub rows: IndexSet,
    pub xi: f64,
    /// Tail levels `ℓ ≥ level_cutoff` are dropped from the operator.
    pub level_cutoff: u8,
    /// Widest spatial window `Δℓ` over the column levels.
    pub window: u8,
    pub windows: SpatialWindow,
    /// Finest spatial level kept in the right-hand side.
    pub rhs_level: u8,
    pub level_error: f64,
    pub window_error: f64,
    pub rhs_error: f64,
}

impl ResidualApprox {
    pub fn bound(&self) -> f64 {
        self.level_error + self.window_error + self.rhs_error
    }
}

/// Residual approximation for `w` with `supp w ⊆ Λ` and tolerance `ξ`.
///
/// The tolerance is split as `ξ/2` for the tail-level truncation, `ξ/4` for the spatial
/// window and `ξ/4` for the truncation of the right-hand side.
pub fn res_approx(
    op: &ParametricOperator,
    rhs: &RhsSource,
    w: &SolutionTensor,
    lambda: &IndexSet,
    xi: f64,
) -> Result<ResidualApprox, SolverError> {
    if !w.support().is_subset(lambda) {
        return Err(SolverError::Postcondition("iterate not supported in the current set".into()));
    }
    let w = w.embed(lambda);
    let wnorm = w.norm();
    let field = op.field();
    let cutoff = op.level_cutoff(wnorm, 0.5 * xi);
    let level_error = field.tail_sup_sum(cutoff) * wnorm;

    let cap = op.max_level();
    let rhs_level = rhs.truncation_level(0.25 * xi, cap);
    let rhs_error = if rhs_level >= cap && op.universe().max_level.is_some() { 0.0 } else { rhs.tail_bound(rhs_level) };
    let f = assemble_rhs(op, rhs, rhs_level);

    let weights = if w.is_zero() { vec![0.0; lambda.mode_len(0)] } else { w.contractions().swap_remove(0) };
    let (windows, window_error) = op.choose_window(&lambda.mode0, &weights, Some(cutoff), 0.25 * xi);
    let block = op.neighborhood_block(lambda, Some(cutoff), &windows, Some(f.support()));
    let r = block.apply(&w)?.sub(&f.embed(&block.rows))?.recompress();
    let norm = r.norm();
    Ok(ResidualApprox {
        r,
        norm,
        rows: block.rows,
        xi,
        level_cutoff: cutoff,
        window: windows.max(),
        windows,
        rhs_level,
        level_error,
        window_error,
        rhs_error,
    })
}
