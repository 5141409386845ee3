//! Affine coefficient `a(x, y) = ā + Σ_j y_j θ_j(x)` with dominant indicators and multilevel tail hats.

use super::basis::{dyadic, ref_hat};
use crate::error::ProblemError;
use serde::{Deserialize, Serialize};

/// One coefficient function `θ_j` (or the mean).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Coefficient {
    Constant(f64),
    /// `amp · χ_(a,b)`.
    Indicator { a: f64, b: f64, amp: f64 },
    /// `amp · h(2^ℓ x − k)`.
    Hat { level: u8, k: u32, amp: f64 },
}

impl Coefficient {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Coefficient::Constant(c) => c,
            Coefficient::Indicator { a, b, amp } => {
                if x > a && x < b {
                    amp
                } else {
                    0.0
                }
            }
            Coefficient::Hat { level, k, amp } => amp * ref_hat(x * (level as f64).exp2() - k as f64),
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match *self {
            Coefficient::Constant(_) => (0.0, 1.0),
            Coefficient::Indicator { a, b, .. } => (a, b),
            Coefficient::Hat { level, k, .. } => {
                let h = dyadic(level);
                (k as f64 * h, (k + 1) as f64 * h)
            }
        }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            Coefficient::Constant(_) => vec![],
            Coefficient::Indicator { a, b, .. } => vec![a, b],
            Coefficient::Hat { .. } => {
                let (a, b) = self.support();
                vec![a, 0.5 * (a + b), b]
            }
        }
    }

    pub fn sup(&self) -> f64 {
        match *self {
            Coefficient::Constant(c) => c.abs(),
            Coefficient::Indicator { amp, .. } | Coefficient::Hat { amp, .. } => amp.abs(),
        }
    }

    /// Level from which the function is linear (hats) or constant (indicators, constants)
    /// on every dyadic interval. `None` when no such level exists below 31.
    pub fn smooth_level(&self) -> Option<u8> {
        match *self {
            Coefficient::Constant(_) => Some(0),
            Coefficient::Indicator { a, b, .. } => Some(dyadic_level(a)?.max(dyadic_level(b)?)),
            Coefficient::Hat { level, .. } => Some(level + 1),
        }
    }

    /// `|θ'|` where it exists (hats only; zero otherwise).
    pub fn slope(&self) -> f64 {
        match *self {
            Coefficient::Hat { level, amp, .. } => amp.abs() * 2.0 * (level as f64).exp2(),
            _ => 0.0,
        }
    }
}

/// Smallest `ℓ ≤ 30` with `x 2^ℓ ∈ ℤ`.
pub fn dyadic_level(x: f64) -> Option<u8> {
    (0u8..=30).find(|&l| {
        let s = x * (l as f64).exp2();
        s == s.round()
    })
}

/// A parameter of the field: its coefficient function and, for tail hats, the level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Parameter {
    /// 1-based position in the level-ordered enumeration.
    pub index: usize,
    pub theta: Coefficient,
    pub level: Option<u8>,
}

fn default_mean() -> f64 {
    1.0
}

/// Field configuration. Dominant parameters `c1 χ_{D_i}` on `D_i = ((i−1)/N, i/N)`,
/// then tail hats `c2 2^{−αℓ} h(2^ℓ x − k)` for `level_min ≤ ℓ ≤ level_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientField {
    #[serde(default = "default_mean")]
    pub mean: f64,
    pub c1: f64,
    pub c2: f64,
    pub n_dominant: usize,
    /// Finest tail level; below `level_min` there are no tail parameters.
    pub level_max: i32,
    pub alpha_decay: f64,
    /// Number of leading parameters with their own tensor mode.
    pub j_split: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectralBounds {
    pub gamma: f64,
    pub big_gamma: f64,
    pub omega: f64,
    pub rho: f64,
    pub kappa: f64,
}

impl CoefficientField {
    /// The configuration of the numerical experiment (60 tail hats on levels 2..=5).
    pub fn reference() -> Self {
        CoefficientField { mean: 1.0, c1: 0.1, c2: 0.1, n_dominant: 4, level_max: 5, alpha_decay: 2.0, j_split: 4 }
    }

    /// Desk-scale default: tail levels 2..=4 (28 tail hats).
    pub fn ci() -> Self {
        CoefficientField { level_max: 4, ..Self::reference() }
    }

    pub fn level_min(&self) -> u8 {
        (self.n_dominant.max(1) as f64).log2().ceil() as u8
    }

    pub fn tail_levels(&self) -> std::ops::RangeInclusive<u8> {
        let lo = self.level_min();
        if self.level_max < lo as i32 {
            #[allow(clippy::reversed_empty_ranges)]
            return 1..=0;
        }
        lo..=(self.level_max as u8)
    }

    pub fn num_params(&self) -> usize {
        self.n_dominant + self.tail_levels().map(|l| 1usize << l).sum::<usize>()
    }

    pub fn validate(&self) -> Result<(), ProblemError> {
        let bad = |m: &str| Err(ProblemError::InvalidField(m.into()));
        if !(self.mean.is_finite() && self.mean > 0.0) {
            return bad("mean must be positive");
        }
        if !(0.0..1.0).contains(&self.c1) || !(0.0..1.0).contains(&self.c2) {
            return bad("amplitudes c1, c2 must lie in [0, 1)");
        }
        if self.n_dominant == 0 {
            return bad("n_dominant must be at least 1");
        }
        if !(self.alpha_decay > 0.0) {
            return bad("alpha_decay must be positive");
        }
        if self.level_max > 24 {
            return bad("level_max above 24 is not supported");
        }
        if self.j_split == 0 || self.j_split > self.num_params() {
            return bad("j_split must lie in 1..=parameter count");
        }
        self.uea_margin().map(|_| ())
    }

    /// Level-ordered parameter enumeration.
    pub fn parameters(&self) -> Vec<Parameter> {
        let n = self.n_dominant;
        let mut out = Vec::with_capacity(self.num_params());
        for i in 0..n {
            let theta = Coefficient::Indicator { a: i as f64 / n as f64, b: (i + 1) as f64 / n as f64, amp: self.c1 };
            out.push(Parameter { index: i + 1, theta, level: None });
        }
        for l in self.tail_levels() {
            let amp = self.c2 * (-self.alpha_decay * l as f64).exp2();
            for k in 0..(1u32 << l) {
                let index = out.len() + 1;
                out.push(Parameter { index, theta: Coefficient::Hat { level: l, k, amp }, level: Some(l) });
            }
        }
        out
    }

    /// `θ_j(x)` for the 1-based parameter index `j`.
    pub fn theta_eval(&self, j: usize, x: f64) -> Result<f64, ProblemError> {
        if j == 0 || j > self.num_params() {
            return Err(ProblemError::InvalidField(format!("parameter index {j} out of range")));
        }
        Ok(self.parameters()[j - 1].theta.eval(x))
    }

    /// `ā − c1 − Σ_ℓ sup_x Σ_k |θ_{ℓ,k}(x)|`, a lower bound on the ellipticity margin
    /// that is summed level by level. Rejects fields whose bound is not positive.
    pub fn uea_margin(&self) -> Result<f64, ProblemError> {
        let dominant = if self.n_dominant > 0 { self.c1 } else { 0.0 };
        let r = self.mean - dominant - self.tail_sup_sum(0);
        if r > 0.0 {
            Ok(r)
        } else {
            Err(ProblemError::NotElliptic(r))
        }
    }

    /// Exact `ess inf_x ā − Σ_j |θ_j(x)|`, evaluated on the dyadic grid where the
    /// tail sum is piecewise linear.
    pub fn uea_margin_pointwise(&self) -> f64 {
        let params = self.parameters();
        let fine = self.level_max.max(self.level_min() as i32).max(0) as u32 + 1;
        let n = 1u64 << fine;
        let mut worst = 0.0f64;
        for i in 0..=n {
            let x = i as f64 / n as f64;
            let s: f64 = params.iter().filter(|p| p.level.is_some()).map(|p| p.theta.eval(x).abs()).sum();
            worst = worst.max(s);
        }
        self.mean - self.c1 - worst
    }

    /// `c2 Σ_{ℓ ≥ L} 2^{−αℓ}` over the field's tail levels.
    pub fn tail_sup_sum(&self, from_level: u8) -> f64 {
        self.tail_levels().filter(|&l| l >= from_level).map(|l| self.c2 * (-self.alpha_decay * l as f64).exp2()).sum()
    }

    pub fn spectral_bounds(&self) -> Result<SpectralBounds, ProblemError> {
        let r = self.uea_margin()?;
        let gamma = r;
        let big_gamma = 2.0 * self.mean - r;
        Ok(SpectralBounds {
            gamma,
            big_gamma,
            omega: 2.0 / (gamma + big_gamma),
            rho: (big_gamma - gamma) / (big_gamma + gamma),
            kappa: big_gamma / gamma,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_enumeration() {
        let f = CoefficientField::reference();
        assert_eq!(f.level_min(), 2);
        assert_eq!(f.num_params(), 64);
        let p = f.parameters();
        assert_eq!(p[4].theta, Coefficient::Hat { level: 2, k: 0, amp: 0.1 / 16.0 });
        assert_eq!(p[63].level, Some(5));
        assert_eq!(CoefficientField::ci().num_params(), 32);
    }

    #[test]
    fn margins() {
        let f = CoefficientField::reference();
        assert_eq!(f.uea_margin().unwrap(), 0.89169921875);
        assert!((f.uea_margin_pointwise() - 0.89375).abs() < 1e-14);
        let flat = CoefficientField { c1: 0.0, c2: 0.0, ..f.clone() };
        assert_eq!(flat.uea_margin().unwrap(), 1.0);
        let bad = CoefficientField { c1: 1.0, ..f };
        assert!(matches!(bad.uea_margin(), Err(ProblemError::NotElliptic(_))));
    }

    #[test]
    fn theta_values() {
        let f = CoefficientField::reference();
        assert_eq!(f.theta_eval(1, 0.1).unwrap(), 0.1);
        assert!((f.theta_eval(5, 0.125).unwrap() - 0.00625).abs() < 1e-17);
        assert_eq!(f.theta_eval(5, 0.5).unwrap(), 0.0);
        assert!(f.theta_eval(65, 0.5).is_err());
    }

    #[test]
    fn dyadic_levels() {
        assert_eq!(dyadic_level(0.0), Some(0));
        assert_eq!(dyadic_level(0.75), Some(2));
        assert_eq!(dyadic_level(1.0 / 3.0), None);
    }
}
