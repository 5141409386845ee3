//! Frozen oracle values, keyed by test-case id.
//!
//! `generate` recomputes everything from the oracles alone; the checked-in JSON is what
//! the unit and acceptance tests read.

use super::dense_problem::{dense_galerkin_solve, stiffness, DenseProblem};
use super::quadrature::{adaptive_quadrature, gauss_legendre_moment};
use crate::error::OracleError;
use crate::problem::{CoefficientField, IndexSet, IndexUniverse, RhsSource, SparseModeIndex, SpatialIndex, TailIndex};
use crate::tensor::ProductIndexSet;
use serde_json::{json, Map, Value};
use smallvec::smallvec;

pub const FIXTURE_VERSION: u32 = 1;

/// Two dominant and two tail parameters (tail level 1 only).
pub fn toy_field() -> CoefficientField {
    CoefficientField { mean: 1.0, c1: 0.3, c2: 0.3, n_dominant: 2, level_max: 1, alpha_decay: 2.0, j_split: 2 }
}

/// Spatial levels `0..=3`, tail indices `0, e_3, e_4`, dominant degrees `0..=2`: 405 entries.
pub fn toy_set() -> IndexSet {
    let tails = [TailIndex::zero(), TailIndex(smallvec![(3, 1)]), TailIndex(smallvec![(4, 1)])];
    let mut mode0 = Vec::new();
    for nu in &tails {
        for level in 0..=3u8 {
            for k in 0..(1u32 << level) {
                mode0.push(SparseModeIndex { nu: nu.clone(), lambda: SpatialIndex::new(level, k) });
            }
        }
    }
    ProductIndexSet::new(mode0, vec![vec![0, 1, 2], vec![0, 1, 2]])
}

/// Spatial level 3 and Legendre degree 2: the toy set lies inside it.
pub fn toy_universe() -> IndexUniverse {
    IndexUniverse { max_level: Some(3), max_degree: Some(2) }
}

/// Every product index of a capped universe: all tail multi-indices over the tail
/// parameters of `field` with degrees up to the cap, all wavelets up to the level cap.
///
/// # Panics
/// If the universe has no level or degree cap.
pub fn universe_set(field: &CoefficientField, universe: &IndexUniverse) -> IndexSet {
    let (lmax, dmax) = (universe.max_level.expect("level cap"), universe.max_degree.expect("degree cap"));
    let tail: Vec<u16> = (field.j_split + 1..=field.num_params()).map(|p| p as u16).collect();
    let mut tails = vec![TailIndex::zero()];
    for &p in &tail {
        tails = tails.iter().flat_map(|t| (0..=dmax).map(move |d| t.with_degree(p, d))).collect();
    }
    let mut mode0 = Vec::new();
    for nu in &tails {
        for level in 0..=lmax {
            for k in 0..(1u32 << level) {
                mode0.push(SparseModeIndex { nu: nu.clone(), lambda: SpatialIndex::new(level, k) });
            }
        }
    }
    ProductIndexSet::new(mode0, vec![(0..=dmax).collect(); field.j_split])
}

/// Level-wise and pointwise ellipticity margins by sampling on a grid finer than every kink.
pub fn uea_by_sampling(field: &CoefficientField) -> (f64, f64) {
    let params = field.parameters();
    let fine = field.level_max.max(0) as u32 + 4;
    let n = 1usize << fine;
    let grid: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    let mut level_sum = 0.0;
    for l in field.tail_levels() {
        let sup = grid
            .iter()
            .map(|&x| params.iter().filter(|p| p.level == Some(l)).map(|p| p.theta.eval(x).abs()).sum::<f64>())
            .fold(0.0f64, f64::max);
        level_sum += sup;
    }
    let dominant = grid
        .iter()
        .map(|&x| params.iter().filter(|p| p.level.is_none()).map(|p| p.theta.eval(x).abs()).sum::<f64>())
        .fold(0.0f64, f64::max);
    let pointwise = grid
        .iter()
        .map(|&x| {
            let tail: f64 = params.iter().filter(|p| p.level.is_some()).map(|p| p.theta.eval(x).abs()).sum();
            field.mean - dominant - tail
        })
        .fold(f64::INFINITY, f64::min);
    (field.mean - dominant - level_sum, pointwise)
}

/// `‖f‖` in the dual norm as `‖F − F̄‖_{L²}` with `F(x) = ∫_0^x f`.
pub fn rhs_norm_by_quadrature(rhs: &RhsSource) -> f64 {
    let big_f = |x: f64| adaptive_quadrature(|t| rhs.eval(t), 0.0, x);
    let mean = adaptive_quadrature(big_f, 0.0, 1.0);
    adaptive_quadrature(|x| (big_f(x) - mean).powi(2), 0.0, 1.0).sqrt()
}

fn lam_json(l: SpatialIndex) -> Value {
    json!([l.level, l.k])
}

pub fn generate() -> Result<Value, OracleError> {
    let mut out = Map::new();
    out.insert("version".into(), json!(FIXTURE_VERSION));

    let reference = CoefficientField::reference();
    let (lw, pw) = uea_by_sampling(&reference);
    out.insert("uea.reference".into(), json!({ "level_wise": lw, "pointwise": pw }));
    let (lw, pw) = uea_by_sampling(&CoefficientField::ci());
    out.insert("uea.ci".into(), json!({ "level_wise": lw, "pointwise": pw }));
    let (lw, pw) = uea_by_sampling(&toy_field());
    out.insert("uea.toy".into(), json!({ "level_wise": lw, "pointwise": pw }));

    let moments: Vec<Vec<f64>> = (0..=12).map(|m| (0..=12).map(|n| gauss_legendre_moment(m, n)).collect()).collect();
    out.insert("legendre.moments_0_12".into(), json!(moments));

    out.insert("rhs.norm.constant_one".into(), json!(rhs_norm_by_quadrature(&RhsSource::Constant(1.0))));

    let field = toy_field();
    let set = toy_set();
    let problem = DenseProblem::assemble(&field, &RhsSource::Constant(1.0), &set)?;
    let u = dense_galerkin_solve(&problem)?;
    let (lo, hi) = problem.eigen_range();
    let labels: Vec<Value> = problem
        .index
        .iter()
        .map(|ix| json!({ "nu": ix.mode0.nu.0.iter().map(|&(p, d)| [p, d]).collect::<Vec<_>>(), "lambda": lam_json(ix.mode0.lambda), "modes": ix.modes }))
        .collect();
    out.insert(
        "toy.galerkin".into(),
        json!({ "index": labels, "u": u.as_slice(), "rhs": problem.rhs.as_slice(), "eigen_min": lo, "eigen_max": hi, "asymmetry": problem.asymmetry() }),
    );

    let samples: Vec<Value> = field
        .parameters()
        .iter()
        .flat_map(|p| {
            let pairs = [((0, 0), (0, 0)), ((1, 0), (1, 1)), ((2, 1), (3, 2)), ((1, 1), (2, 2)), ((3, 5), (3, 5))];
            pairs.into_iter().map(move |(a, b)| {
                let (la, lb) = (SpatialIndex::new(a.0, a.1), SpatialIndex::new(b.0, b.1));
                json!({ "param": p.index, "lam": lam_json(la), "mu": lam_json(lb), "value": stiffness(&p.theta, la, lb) })
            })
        })
        .collect();
    out.insert("stiffness.toy".into(), json!(samples));
    Ok(Value::Object(out))
}

/// Pretty JSON of [`generate`], newline-terminated.
pub fn to_string() -> Result<String, OracleError> {
    let v = generate()?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| OracleError::Input(e.to_string()))?;
    s.push('\n');
    Ok(s)
}
