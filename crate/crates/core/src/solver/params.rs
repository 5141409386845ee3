use crate::error::SolverError;
use crate::problem::SpectralBounds;
use serde::{Deserialize, Serialize};

/// Scalar knobs of the three solver layers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverParams {
    /// Target residual `ε`.
    pub eps: f64,
    /// Bulk parameter `α ∈ (0, κ^{-1/2})`.
    pub alpha: f64,
    /// Relative residual tolerance `δ ∈ (0, α)`.
    pub delta: f64,
    /// Relative Galerkin tolerance `η`.
    pub eta: f64,
    /// Threshold-control constants of the inner solver.
    pub nu_st: f64,
    pub theta_st: f64,
    /// Initial threshold; `None` means `ω‖f_Λ‖/E`.
    pub tau0: Option<f64>,
    /// Seed factor for `ξ`.
    pub theta_outer: f64,
    pub outer_cap: usize,
    pub inner_cap: usize,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            eps: 1e-3,
            alpha: 0.5,
            delta: 0.1,
            eta: 0.1,
            nu_st: 0.5,
            theta_st: 0.5,
            tau0: None,
            theta_outer: 0.5,
            outer_cap: 200,
            inner_cap: 10_000,
        }
    }
}

impl SolverParams {
    pub fn mu(&self) -> f64 {
        (self.alpha + self.delta) / (1.0 - self.delta)
    }

    /// Upper end of the admissible interval for `η`.
    pub fn eta_bound(&self, kappa: f64) -> f64 {
        (1.0 - self.delta) * (self.alpha - self.delta) / ((1.0 + self.delta) * kappa)
    }

    /// Energy-error contraction factor of the outer loop.
    pub fn rho_outer(&self, kappa: f64) -> f64 {
        let a = (self.alpha - self.delta) / (1.0 + self.delta);
        let e = self.eta / (1.0 - self.delta);
        (1.0 - a * a / kappa + e * e * kappa).sqrt()
    }

    pub fn validate(&self, b: &SpectralBounds) -> Result<(), SolverError> {
        let bad = |m: String| Err(SolverError::Inadmissible(m));
        let open01 = |x: f64| x > 0.0 && x < 1.0;
        let limit = b.kappa.powf(-0.5);
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return bad(format!("eps = {} must be positive", self.eps));
        }
        if !(self.alpha > 0.0 && self.alpha < limit) {
            return bad(format!("alpha = {} outside (0, {limit:.6})", self.alpha));
        }
        if !(self.delta > 0.0 && self.delta < self.alpha) {
            return bad(format!("delta = {} outside (0, alpha)", self.delta));
        }
        if self.mu() >= limit {
            return bad(format!("mu = {:.6} not below kappa^(-1/2) = {limit:.6}", self.mu()));
        }
        let eb = self.eta_bound(b.kappa);
        if !(self.eta > 0.0 && self.eta < eb) {
            return bad(format!("eta = {} outside (0, {eb:.6})", self.eta));
        }
        for (name, v) in [("nu_st", self.nu_st), ("theta_st", self.theta_st), ("theta_outer", self.theta_outer)] {
            if !open01(v) {
                return bad(format!("{name} = {v} outside (0, 1)"));
            }
        }
        if let Some(t) = self.tau0 {
            if !(t.is_finite() && t >= 0.0) {
                return bad(format!("tau0 = {t} must be nonnegative"));
            }
        }
        if self.outer_cap == 0 || self.inner_cap == 0 {
            return bad("iteration caps must be positive".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::CoefficientField;

    #[test]
    fn defaults_admissible_for_reference_config() {
        let b = CoefficientField::reference().spectral_bounds().unwrap();
        let p = SolverParams::default();
        p.validate(&b).unwrap();
        assert!((p.eta_bound(b.kappa) - 0.2633).abs() < 1e-3);
        assert!((p.rho_outer(b.kappa) - 0.9534).abs() < 1e-3);
    }

    #[test]
    fn rejects_large_alpha_and_eta() {
        let b = CoefficientField::reference().spectral_bounds().unwrap();
        assert!(SolverParams { alpha: 0.95, ..Default::default() }.validate(&b).is_err());
        assert!(SolverParams { eta: 0.3, ..Default::default() }.validate(&b).is_err());
        assert!(SolverParams { delta: 0.6, ..Default::default() }.validate(&b).is_err());
    }
}
