//! Spatial basis on (0, 1): hierarchical hat functions normalized in H¹₀.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Dyadic wavelet index: level `ℓ ≥ 0` and translation `0 ≤ k < 2^ℓ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SpatialIndex {
    pub level: u8,
    pub k: u32,
}

impl SpatialIndex {
    pub fn new(level: u8, k: u32) -> Self {
        debug_assert!(level < 32 && (k as u64) < (1u64 << level));
        SpatialIndex { level, k }
    }

    pub fn root() -> Self {
        SpatialIndex { level: 0, k: 0 }
    }

    pub fn is_valid(&self) -> bool {
        self.level < 32 && (self.k as u64) < (1u64 << self.level)
    }

    /// Support interval `(k 2^-ℓ, (k+1) 2^-ℓ)`.
    pub fn support(&self) -> (f64, f64) {
        let h = dyadic(self.level);
        (self.k as f64 * h, (self.k + 1) as f64 * h)
    }

    pub fn parent(&self) -> Option<Self> {
        (self.level > 0).then(|| SpatialIndex { level: self.level - 1, k: self.k / 2 })
    }

    pub fn children(&self) -> [Self; 2] {
        let l = self.level + 1;
        [SpatialIndex { level: l, k: 2 * self.k }, SpatialIndex { level: l, k: 2 * self.k + 1 }]
    }

    /// Indices at `level` whose supports meet `(a, b)` in a set of positive length.
    pub fn overlapping(level: u8, a: f64, b: f64) -> std::ops::Range<u32> {
        if b <= a {
            return 0..0;
        }
        let n = 1u64 << level;
        let s = n as f64;
        let lo = (a * s).floor().max(0.0) as u64;
        let hi = ((b * s).ceil().min(s) as u64).min(n);
        (lo as u32)..(hi.max(lo) as u32)
    }
}

impl fmt::Display for SpatialIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.level, self.k)
    }
}

/// `2^{-ℓ}`.
pub fn dyadic(level: u8) -> f64 {
    (-(level as f64)).exp2()
}

/// Reference hat `max(0, 1 − |2t − 1|)` on (0, 1).
pub fn ref_hat(t: f64) -> f64 {
    (1.0 - (2.0 * t - 1.0).abs()).max(0.0)
}

/// Interface for spatial bases usable by the stiffness assembly.
///
/// Only the order-1 hat system is implemented. Higher-order systems must keep
/// the H¹₀-orthonormality used by the spectral bounds.
pub trait SpatialBasis: Send + Sync {
    fn order(&self) -> usize;
    fn value(&self, lam: SpatialIndex, x: f64) -> f64;
    /// Derivative at `x`, taken from the right at breakpoints.
    fn derivative(&self, lam: SpatialIndex, x: f64) -> f64;
    /// Points where the function stops being a single polynomial, endpoints included.
    fn breakpoints(&self, lam: SpatialIndex) -> Vec<f64>;
    fn integral(&self, lam: SpatialIndex) -> f64;
}

/// `ψ_λ(x) = 2^{-ℓ/2}/2 · h(2^ℓ x − k)`, so that `∫ ψ'_λ ψ'_μ = δ_λμ`.
#[derive(Clone, Copy, Debug, Default)]
pub struct HatBasis;

impl HatBasis {
    pub fn scale(level: u8) -> f64 {
        0.5 * (-(level as f64) / 2.0).exp2()
    }

    /// `|ψ'_λ|`, constant on each half of the support.
    pub fn slope(level: u8) -> f64 {
        (level as f64 / 2.0).exp2()
    }

    pub fn sup(level: u8) -> f64 {
        Self::scale(level)
    }
}

impl SpatialBasis for HatBasis {
    fn order(&self) -> usize {
        1
    }

    fn value(&self, lam: SpatialIndex, x: f64) -> f64 {
        let t = x * (lam.level as f64).exp2() - lam.k as f64;
        Self::scale(lam.level) * ref_hat(t)
    }

    fn derivative(&self, lam: SpatialIndex, x: f64) -> f64 {
        let (a, b) = lam.support();
        if x < a || x >= b {
            return 0.0;
        }
        let s = Self::slope(lam.level);
        if x < 0.5 * (a + b) {
            s
        } else {
            -s
        }
    }

    fn breakpoints(&self, lam: SpatialIndex) -> Vec<f64> {
        let (a, b) = lam.support();
        vec![a, 0.5 * (a + b), b]
    }

    fn integral(&self, lam: SpatialIndex) -> f64 {
        0.25 * (-1.5 * lam.level as f64).exp2()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlap_ranges() {
        assert_eq!(SpatialIndex::overlapping(2, 0.0, 1.0), 0..4);
        assert_eq!(SpatialIndex::overlapping(2, 0.25, 0.5), 1..2);
        assert_eq!(SpatialIndex::overlapping(3, 0.3, 0.55), 2..5);
        assert_eq!(SpatialIndex::overlapping(1, 0.5, 0.5), 0..0);
    }

    #[test]
    fn hat_values() {
        let b = HatBasis;
        let l = SpatialIndex::new(2, 1);
        assert!((b.value(l, 0.375) - 0.25).abs() < 1e-15);
        assert_eq!(b.value(l, 0.2), 0.0);
        assert_eq!(b.derivative(l, 0.3), 2.0);
        assert_eq!(b.derivative(l, 0.4), -2.0);
        assert!((b.integral(l) - 0.25 / 8.0).abs() < 1e-16);
    }
}
