//! Explicit Galerkin matrices over a flattened product set, with a CG reference solve.
//!
//! Assembly re-derives every entry from the field definition: basis derivatives are
//! evaluated here, spatial integrals use the adaptive Kronrod rule and parametric moments
//! an exact-degree Gauss rule. Nothing is shared with the operator code beyond the field
//! and index types.

use super::quadrature::{adaptive_quadrature_with_breaks, gauss_legendre_moment};
use crate::error::OracleError;
use crate::problem::{CoefficientField, Coefficient, IndexSet, RhsSource, SolutionTensor, SparseModeIndex, SpatialIndex};
use nalgebra::{DMatrix, DVector};
use std::collections::HashMap;

/// Largest flattened system the oracle accepts.
pub const DENSE_PROBLEM_CAP: usize = 1_000_000;

/// Flattened coordinates of one product-set entry.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FlatIndex {
    pub mode0: SparseModeIndex,
    /// Degrees in the parametric modes `1..=J`.
    pub modes: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct DenseProblem {
    /// Symmetric matrix by rows: `(column, value)` pairs, sorted by column.
    pub rows: Vec<Vec<(usize, f64)>>,
    pub rhs: DVector<f64>,
    /// Row-major enumeration of the product set (mode 0 slowest), matching dense tensors.
    pub index: Vec<FlatIndex>,
    pub support: IndexSet,
}

fn psi(lam: SpatialIndex, x: f64) -> f64 {
    let s = (lam.level as f64).exp2();
    let t = s * x - lam.k as f64;
    0.5 / s.sqrt() * (1.0 - (2.0 * t - 1.0).abs()).max(0.0)
}

fn dpsi(lam: SpatialIndex, x: f64) -> f64 {
    let s = (lam.level as f64).exp2();
    let t = s * x - lam.k as f64;
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else if t < 0.5 {
        s.sqrt()
    } else {
        -s.sqrt()
    }
}

fn spatial_breaks(lam: SpatialIndex) -> [f64; 3] {
    let h = (-(lam.level as f64)).exp2();
    let a = lam.k as f64 * h;
    [a, a + 0.5 * h, a + h]
}

/// `∫ θ ψ'_λ ψ'_μ dx`.
pub fn stiffness(theta: &Coefficient, lam: SpatialIndex, mu: SpatialIndex) -> f64 {
    let (a1, b1) = lam.support();
    let (a2, b2) = mu.support();
    let (a3, b3) = theta.support();
    let (lo, hi) = (a1.max(a2).max(a3), b1.min(b2).min(b3));
    if hi <= lo {
        return 0.0;
    }
    let mut br: Vec<f64> = spatial_breaks(lam).into_iter().chain(spatial_breaks(mu)).collect();
    br.extend(theta.breakpoints());
    adaptive_quadrature_with_breaks(|x| theta.eval(x) * dpsi(lam, x) * dpsi(mu, x), lo, hi, &br)
}

/// `∫ f ψ_λ dx`.
pub fn load(rhs: &RhsSource, lam: SpatialIndex) -> f64 {
    let (a, b) = lam.support();
    let mut br = spatial_breaks(lam).to_vec();
    if let RhsSource::Piecewise(p) = rhs {
        br.extend(p.iter().flat_map(|q| [q.a, q.b]));
    }
    adaptive_quadrature_with_breaks(|x| rhs.eval(x) * psi(lam, x), a, b, &br)
}

impl DenseProblem {
    /// Galerkin system of `field` and `rhs` on the product set `set`.
    pub fn assemble(field: &CoefficientField, rhs: &RhsSource, set: &IndexSet) -> Result<Self, OracleError> {
        let j = set.j();
        if j != field.j_split {
            return Err(OracleError::Input(format!("set has {j} parametric modes, field splits {}", field.j_split)));
        }
        let n = set.mode_lens().iter().try_fold(1usize, |acc, &m| acc.checked_mul(m));
        let n = match n {
            Some(n) if n <= DENSE_PROBLEM_CAP => n,
            _ => return Err(OracleError::TooLarge(format!("product set of sizes {:?}", set.mode_lens()))),
        };
        let params = field.parameters();
        let np = params.len();

        let mut index = Vec::with_capacity(n);
        let mut full_nu = Vec::with_capacity(n);
        let mut coords = vec![0usize; j + 1];
        for _ in 0..n {
            let mode0 = set.mode0[coords[0]].clone();
            let modes: Vec<u32> = (1..=j).map(|m| set.modes[m - 1][coords[m]]).collect();
            let mut nu = vec![0u32; np];
            nu[..j].copy_from_slice(&modes);
            for &(p, d) in mode0.nu.0.iter() {
                let p = p as usize;
                if p <= j || p > np {
                    return Err(OracleError::Input(format!("tail index names parameter {p}")));
                }
                nu[p - 1] = d as u32;
            }
            full_nu.push(nu);
            index.push(FlatIndex { mode0, modes });
            for m in (0..=j).rev() {
                coords[m] += 1;
                if coords[m] < set.mode_len(m) {
                    break;
                }
                coords[m] = 0;
            }
        }

        let mut groups: HashMap<&[u32], Vec<usize>> = HashMap::new();
        for (pos, nu) in full_nu.iter().enumerate() {
            groups.entry(nu.as_slice()).or_default().push(pos);
        }
        let mean = Coefficient::Constant(field.mean);
        let mut memo: HashMap<(usize, SpatialIndex, SpatialIndex), f64> = HashMap::new();
        let mut entry = |p: usize, a: SpatialIndex, b: SpatialIndex| -> f64 {
            let key = if a <= b { (p, a, b) } else { (p, b, a) };
            *memo.entry(key).or_insert_with(|| {
                let theta = if p == 0 { &mean } else { &params[p - 1].theta };
                stiffness(theta, key.1, key.2)
            })
        };

        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (row, nu) in full_nu.iter().enumerate() {
            let lam = index[row].mode0.lambda;
            let mut acc: HashMap<usize, f64> = HashMap::new();
            for &col in &groups[nu.as_slice()] {
                let v = entry(0, lam, index[col].mode0.lambda);
                if v != 0.0 {
                    *acc.entry(col).or_insert(0.0) += v;
                }
            }
            for p in 1..=np {
                let d = nu[p - 1];
                for nd in [d.wrapping_sub(1), d + 1] {
                    if nd == u32::MAX {
                        continue;
                    }
                    let mut other = nu.clone();
                    other[p - 1] = nd;
                    let Some(cols) = groups.get(other.as_slice()) else { continue };
                    let moment = gauss_legendre_moment(d as usize, nd as usize);
                    for &col in cols {
                        let v = entry(p, lam, index[col].mode0.lambda);
                        if v != 0.0 {
                            *acc.entry(col).or_insert(0.0) += moment * v;
                        }
                    }
                }
            }
            let mut r: Vec<(usize, f64)> = acc.into_iter().collect();
            r.sort_by_key(|&(c, _)| c);
            rows[row] = r;
        }

        let rhs_vec = DVector::from_iterator(
            n,
            index.iter().zip(&full_nu).map(|(ix, nu)| if nu.iter().all(|&d| d == 0) { load(rhs, ix.mode0.lambda) } else { 0.0 }),
        );
        Ok(DenseProblem { rows, rhs: rhs_vec, index, support: set.clone() })
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.len(), self.rows.iter().map(|r| r.iter().map(|&(c, a)| a * v[c]).sum()))
    }

    pub fn to_dense_matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, r) in self.rows.iter().enumerate() {
            for &(c, a) in r {
                m[(i, c)] = a;
            }
        }
        m
    }

    /// Largest `|A_ij − A_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, r) in self.rows.iter().enumerate() {
            for &(c, a) in r {
                let back = self.rows[c].binary_search_by_key(&i, |&(k, _)| k).map(|p| self.rows[c][p].1).unwrap_or(0.0);
                worst = worst.max((a - back).abs());
            }
        }
        worst
    }

    /// Extreme eigenvalues of the (symmetrized) dense matrix.
    pub fn eigen_range(&self) -> (f64, f64) {
        let m = self.to_dense_matrix();
        let s = (&m + m.transpose()) * 0.5;
        let e = s.symmetric_eigenvalues();
        (e.min(), e.max())
    }

    /// `‖I − ωA‖` by power iteration from a fixed start vector.
    pub fn shifted_norm(&self, omega: f64, iterations: usize) -> f64 {
        let n = self.len();
        let mut v = DVector::from_fn(n, |i, _| ((i as f64 + 1.0) * 0.618_033_988_749_894_9).fract() - 0.5);
        v /= v.norm();
        let mut est = 0.0;
        for _ in 0..iterations {
            let w = &v - self.apply(&v) * omega;
            est = w.norm();
            if est == 0.0 {
                return 0.0;
            }
            v = w / est;
        }
        est
    }

    /// Flattened coefficients of a tensor supported in this problem's set.
    pub fn vector_of(&self, t: &SolutionTensor) -> Result<DVector<f64>, OracleError> {
        if !t.support().is_subset(&self.support) {
            return Err(OracleError::Input("tensor support exceeds the problem set".into()));
        }
        let d = t.to_dense_on(&self.support)?;
        Ok(DVector::from_vec(d.data))
    }

    /// `‖v‖_A = (vᵀ A v)^{1/2}`.
    pub fn energy_norm(&self, v: &DVector<f64>) -> f64 {
        v.dot(&self.apply(v)).max(0.0).sqrt()
    }
}

/// Conjugate gradients for `A_Λ u = f_Λ` to relative residual 1e-12.
pub fn dense_galerkin_solve(problem: &DenseProblem) -> Result<DVector<f64>, OracleError> {
    cg(problem, &problem.rhs, 1e-12)
}

/// Conjugate gradients for `A x = b` from `x = 0` to `‖b − A x‖ ≤ rel ‖b‖`.
pub fn cg(problem: &DenseProblem, b: &DVector<f64>, rel: f64) -> Result<DVector<f64>, OracleError> {
    let n = problem.len();
    let mut x = DVector::zeros(n);
    let bnorm = b.norm();
    if bnorm == 0.0 {
        return Ok(x);
    }
    let mut r = b.clone();
    let mut p = r.clone();
    let mut rr = r.dot(&r);
    let cap = 10 * n + 100;
    for _ in 0..cap {
        if rr.sqrt() <= rel * bnorm {
            return Ok(x);
        }
        let ap = problem.apply(&p);
        let pap = p.dot(&ap);
        if !(pap > 0.0) {
            break;
        }
        let a = rr / pap;
        x.axpy(a, &p, 1.0);
        r.axpy(-a, &ap, 1.0);
        let rr_new = r.dot(&r);
        p = &r + &p * (rr_new / rr);
        rr = rr_new;
    }
    let res = (b - problem.apply(&x)).norm() / bnorm;
    if res <= rel {
        return Ok(x);
    }
    Err(OracleError::Stagnation { iterations: cap, residual: res })
}
