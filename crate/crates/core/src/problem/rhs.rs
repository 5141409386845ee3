//! Piecewise polynomial sources `f(x)` and their coefficient tensors.

use super::basis::{HatBasis, SpatialBasis, SpatialIndex};
use super::index::SparseModeIndex;
use super::operator::{IndexSet, ParametricOperator, SolutionTensor};
use super::quadrature::{gauss4_composite, gauss_legendre};
use crate::error::ProblemError;
use crate::tensor::{HTensor, ProductIndexSet};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

/// Largest polynomial degree the 4-point rule integrates exactly against a hat.
pub const MAX_RHS_DEGREE: usize = 6;

/// `Σ_i coeffs[i] x^i` on `(a, b)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub a: f64,
    pub b: f64,
    pub coeffs: Vec<f64>,
}

impl Piece {
    fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// `∫_a^x` of the piece, for `a ≤ x ≤ b`.
    fn antiderivative(&self, x: f64) -> f64 {
        let prim = |t: f64| self.coeffs.iter().enumerate().map(|(i, &c)| c * t.powi(i as i32 + 1) / (i + 1) as f64).sum::<f64>();
        prim(x) - prim(self.a)
    }
}

/// Source term: a constant or piecewise polynomials on disjoint subintervals of (0, 1).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RhsSource {
    Constant(f64),
    Piecewise(Vec<Piece>),
}

impl Default for RhsSource {
    fn default() -> Self {
        RhsSource::Constant(1.0)
    }
}

impl RhsSource {
    fn pieces(&self) -> Vec<Piece> {
        match self {
            RhsSource::Constant(c) => vec![Piece { a: 0.0, b: 1.0, coeffs: vec![*c] }],
            RhsSource::Piecewise(p) => p.clone(),
        }
    }

    pub fn validate(&self) -> Result<(), ProblemError> {
        let mut pieces = self.pieces();
        pieces.sort_by(|x, y| x.a.partial_cmp(&y.a).unwrap_or(std::cmp::Ordering::Equal));
        let mut last = 0.0;
        for p in &pieces {
            if !(p.a >= last && p.b > p.a && p.b <= 1.0) {
                return Err(ProblemError::InvalidField(format!("rhs piece ({}, {}) overlaps or leaves (0, 1)", p.a, p.b)));
            }
            if p.coeffs.len() > MAX_RHS_DEGREE + 1 || p.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(ProblemError::InvalidField("rhs piece degree above 6 or non-finite".into()));
            }
            last = p.b;
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.pieces().iter().filter(|p| x > p.a && x < p.b).map(|p| p.eval(x)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.pieces().iter().all(|p| p.coeffs.iter().all(|&c| c == 0.0))
    }

    /// `∫ f ψ_λ dx`.
    pub fn load(&self, lam: SpatialIndex) -> f64 {
        let basis = HatBasis;
        let (la, lb) = lam.support();
        self.pieces()
            .iter()
            .map(|p| {
                let (lo, hi) = (p.a.max(la), p.b.min(lb));
                if hi <= lo {
                    return 0.0;
                }
                let mut br: Vec<f64> = basis.breakpoints(lam).into_iter().filter(|&x| x > lo && x < hi).collect();
                br.insert(0, lo);
                br.push(hi);
                gauss4_composite(&br, |x| p.eval(x) * basis.value(lam, x))
            })
            .sum()
    }

    /// Upper bound on `sup |f|` over (0, 1).
    pub fn sup_bound(&self) -> f64 {
        self.pieces().iter().map(|p| p.coeffs.iter().map(|c| c.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// `‖f‖` of the full coefficient sequence, i.e. `‖F − F̄‖_{L²}` with `F(x) = ∫_0^x f`.
    pub fn norm(&self) -> f64 {
        let mut pieces = self.pieces();
        pieces.sort_by(|x, y| x.a.partial_cmp(&y.a).unwrap());
        let mut offsets = Vec::with_capacity(pieces.len());
        let mut acc = 0.0;
        for p in &pieces {
            offsets.push(acc);
            acc += p.antiderivative(p.b);
        }
        let big_f = |x: f64| -> f64 {
            let mut v = 0.0;
            for (p, off) in pieces.iter().zip(&offsets) {
                if x <= p.a {
                    break;
                }
                v = off + p.antiderivative(x.min(p.b));
            }
            v
        };
        let mut br: Vec<f64> = vec![0.0, 1.0];
        for p in &pieces {
            br.push(p.a);
            br.push(p.b);
        }
        br.sort_by(|a, b| a.partial_cmp(b).unwrap());
        br.dedup();
        let (gx, gw) = gauss_legendre(MAX_RHS_DEGREE + 3);
        let integrate = |g: &dyn Fn(f64) -> f64| -> f64 {
            br.windows(2)
                .map(|w| {
                    let (h, m) = (0.5 * (w[1] - w[0]), 0.5 * (w[1] + w[0]));
                    gx.iter().zip(&gw).map(|(&t, &wt)| wt * g(m + h * t)).sum::<f64>() * h
                })
                .sum()
        };
        let mean = integrate(&big_f);
        integrate(&|x| (big_f(x) - mean).powi(2)).max(0.0).sqrt()
    }

    /// Bound on the norm of the coefficients on levels above `level`.
    pub fn tail_bound(&self, level: u8) -> f64 {
        self.sup_bound() * (-(level as f64 + 1.0)).exp2() / 12f64.sqrt()
    }

    /// Minimal level whose tail bound is at most `tol`, capped at `max_level`.
    pub fn truncation_level(&self, tol: f64, max_level: u8) -> u8 {
        (0..max_level).find(|&l| self.tail_bound(l) <= tol).unwrap_or(max_level)
    }
}

/// `f ⊗ e_0 ⊗ ⋯ ⊗ e_0` with spatial coefficients on levels `0..=level` at tail index 0.
pub fn assemble_rhs(op: &ParametricOperator, rhs: &RhsSource, level: u8) -> SolutionTensor {
    let level = level.min(op.max_level());
    let mut mode0 = Vec::new();
    let mut vals = Vec::new();
    if !rhs.is_zero() {
        for l in 0..=level {
            for k in 0..(1u32 << l) {
                let lam = SpatialIndex::new(l, k);
                let v = rhs.load(lam);
                if v != 0.0 {
                    mode0.push(SparseModeIndex::spatial(lam));
                    vals.push(v);
                }
            }
        }
    }
    let j = op.j();
    if mode0.is_empty() {
        return HTensor::zero(op.tree(), ProductIndexSet::empty(j));
    }
    let support: IndexSet = ProductIndexSet::new(mode0, vec![vec![0]; j]);
    let mut vectors = vec![DVector::from_vec(vals)];
    vectors.extend((0..j).map(|_| DVector::from_element(1, 1.0)));
    HTensor::rank_one(op.tree(), support, vectors).expect("rhs shapes")
}
