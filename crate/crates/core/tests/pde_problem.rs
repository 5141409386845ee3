mod common;

use common::{random_htensor_on, rng};
use htpde::oracle::fixtures::{toy_field, toy_set, toy_universe, universe_set};
use htpde::oracle::{gauss_legendre_moment, DenseProblem};
use htpde::problem::legendre;
use htpde::problem::operator::stiffness_entry;
use htpde::problem::*;
use htpde::ProblemError;
use htpde::tensor::ProductIndexSet;
use nalgebra::DVector;
use proptest::prelude::*;
use rand::Rng;
use serde_json::Value;

fn fixtures() -> Value {
    serde_json::from_str(include_str!("fixtures/oracle_fixtures.json")).unwrap()
}

fn toy_op() -> ParametricOperator {
    ParametricOperator::new(toy_field(), toy_universe()).unwrap()
}

#[test]
fn uea_margins_match_sampling_oracle() {
    let fx = fixtures();
    for (key, field) in [("uea.reference", CoefficientField::reference()), ("uea.ci", CoefficientField::ci()), ("uea.toy", toy_field())] {
        let lw = fx[key]["level_wise"].as_f64().unwrap();
        let pw = fx[key]["pointwise"].as_f64().unwrap();
        assert!((field.uea_margin().unwrap() - lw).abs() < 1e-15, "{key}");
        assert!((field.uea_margin_pointwise() - pw).abs() < 1e-15, "{key}");
    }
    assert_eq!(fx["uea.reference"]["level_wise"].as_f64().unwrap(), 0.89169921875);
}

#[test]
fn spectral_bounds_of_reference_config() {
    let b = CoefficientField::reference().spectral_bounds().unwrap();
    let r = 0.89169921875;
    assert_eq!(b.gamma, r);
    assert_eq!(b.big_gamma, 2.0 - r);
    assert_eq!(b.omega, 1.0);
    assert!((b.rho - 0.10830078125).abs() < 1e-15);
    assert!((b.kappa - (2.0 - r) / r).abs() < 1e-15);
}

#[test]
fn non_elliptic_field_rejected() {
    let f = CoefficientField { c1: 0.9, c2: 0.9, alpha_decay: 0.1, ..CoefficientField::ci() };
    assert!(matches!(f.validate(), Err(ProblemError::NotElliptic(_))));
    let f = CoefficientField { j_split: 0, ..CoefficientField::ci() };
    assert!(matches!(f.validate(), Err(ProblemError::InvalidField(_))));
}

#[test]
fn legendre_coupling_matches_moment_fixtures() {
    let fx = fixtures();
    let m = fx["legendre.moments_0_12"].as_array().unwrap();
    for (a, row) in m.iter().enumerate() {
        for (b, v) in row.as_array().unwrap().iter().enumerate() {
            let want = v.as_f64().unwrap();
            assert!((legendre::coupling(a as u32, b as u32) - want).abs() < 1e-12, "({a}, {b})");
            assert!((gauss_legendre_moment(a, b) - want).abs() < 1e-15);
        }
    }
    assert!((legendre::coupling(0, 1) - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
}

#[test]
fn stiffness_entries_match_quadrature_fixtures() {
    let fx = fixtures();
    let params = toy_field().parameters();
    let lam = |v: &Value| SpatialIndex::new(v[0].as_u64().unwrap() as u8, v[1].as_u64().unwrap() as u32);
    let samples = fx["stiffness.toy"].as_array().unwrap();
    assert!(!samples.is_empty());
    for s in samples {
        let p = &params[s["param"].as_u64().unwrap() as usize - 1];
        let got = stiffness_entry(&HatBasis, &p.theta, lam(&s["lam"]), lam(&s["mu"]));
        let want = s["value"].as_f64().unwrap();
        assert!((got - want).abs() < 1e-12, "param {} {:?} {:?}: {got} vs {want}", p.index, s["lam"], s["mu"]);
    }
}

#[test]
fn rhs_norm_matches_fixture() {
    let want = fixtures()["rhs.norm.constant_one"].as_f64().unwrap();
    assert!((RhsSource::Constant(1.0).norm() - want).abs() < 1e-13);
}

#[test]
fn galerkin_matrix_matches_dense_oracle() {
    let op = toy_op();
    let set = toy_set();
    let problem = DenseProblem::assemble(op.field(), &RhsSource::Constant(1.0), &set).unwrap();
    let a = op.galerkin_block(&set, None).to_dense();
    let b = problem.to_dense_matrix();
    let diff = (&a - &b).abs().max();
    assert!(diff < 1e-12, "max entry difference {diff:e}");
    let asym = (&a - a.transpose()).abs().max();
    assert!(asym <= 1e-12 * a.abs().max());
}

#[test]
fn galerkin_spectrum_within_bounds() {
    let op = toy_op();
    let b = op.bounds();
    let fx = fixtures();
    let g = &fx["toy.galerkin"];
    let (lo, hi) = (g["eigen_min"].as_f64().unwrap(), g["eigen_max"].as_f64().unwrap());
    assert!(lo >= b.gamma - 1e-12 && hi <= b.big_gamma + 1e-12, "[{lo}, {hi}] vs [{}, {}]", b.gamma, b.big_gamma);
    let a = op.galerkin_block(&toy_set(), None).to_dense();
    let e = ((&a + a.transpose()) * 0.5).symmetric_eigenvalues();
    assert!((e.min() - lo).abs() < 1e-10 && (e.max() - hi).abs() < 1e-10);
}

#[test]
fn rhs_matches_oracle_loads() {
    let op = toy_op();
    let set = toy_set();
    let rhs = RhsSource::Constant(1.0);
    let f = assemble_rhs(&op, &rhs, 3).embed(&set);
    let want: Vec<f64> = fixtures()["toy.galerkin"]["rhs"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    let got = f.to_dense_on(&set).unwrap().data;
    assert!(common::max_diff(&got, &want) < 1e-13);
}

#[test]
fn block_apply_matches_dense_oracle() {
    let op = toy_op();
    let set = toy_set();
    let problem = DenseProblem::assemble(op.field(), &RhsSource::Constant(1.0), &set).unwrap();
    let block = op.galerkin_block(&set, None);
    let mut r = rng(7);
    for _ in 0..5 {
        let v = random_htensor_on(&mut r, set.clone(), 3);
        let x = problem.vector_of(&v).unwrap();
        let got = block.apply(&v).unwrap().to_dense_on(&set).unwrap().data;
        let want = problem.apply(&x);
        let scale = want.amax().max(1.0);
        assert!(common::max_diff(&got, want.as_slice()) < 1e-11 * scale);
    }
}

#[test]
fn exact_apply_matches_universe_oracle() {
    let op = toy_op();
    let uni = universe_set(op.field(), op.universe());
    let problem = DenseProblem::assemble(op.field(), &RhsSource::Constant(1.0), &uni).unwrap();
    let mut r = rng(11);
    for _ in 0..3 {
        let v = random_htensor_on(&mut r, toy_set(), 2);
        let av = op.apply_exact(&v, None).unwrap();
        assert!(av.support().is_subset(&uni));
        let got = av.embed(&uni).to_dense_on(&uni).unwrap().data;
        let want = problem.apply(&problem.vector_of(&v.embed(&uni)).unwrap());
        assert!(common::max_diff(&got, want.as_slice()) < 1e-11 * want.amax().max(1.0));
    }
}

#[test]
fn window_bound_covers_discarded_mass() {
    let op = toy_op();
    let set = toy_set();
    let mut r = rng(5);
    let v = random_htensor_on(&mut r, set.clone(), 2);
    let exact = op.apply_exact(&v, None).unwrap();
    let weights = v.contractions().swap_remove(0);
    for delta in 0..3u8 {
        let approx = op.apply(&v, None, delta).unwrap();
        let rows = exact.support().union(approx.support());
        let err = exact.embed(&rows).sub(&approx.embed(&rows)).unwrap().norm();
        let bound = op.window_discard_bound(&set.mode0, &weights, None, &htpde::problem::operator::SpatialWindow::uniform(delta));
        assert!(err <= bound * (1.0 + 1e-10) + 1e-12, "delta {delta}: {err:e} > {bound:e}");
    }
}

#[test]
fn level_cutoff_drops_only_certified_mass() {
    let field = CoefficientField { level_max: 3, c2: 0.5, ..toy_field() };
    let op = ParametricOperator::new(field.clone(), toy_universe()).unwrap();
    let mut r = rng(9);
    let support: IndexSet =
        ProductIndexSet::new(toy_set().mode0.into_iter().filter(|x| x.nu.is_zero()).collect(), vec![vec![0, 1], vec![0, 1]]);
    let v = random_htensor_on(&mut r, support, 2);
    let full = op.apply_exact(&v, None).unwrap();
    for cutoff in field.tail_levels() {
        let cut = op.apply_exact(&v, Some(cutoff)).unwrap();
        let rows = full.support().union(cut.support());
        let err = full.embed(&rows).sub(&cut.embed(&rows)).unwrap().norm();
        assert!(err <= field.tail_sup_sum(cutoff) * v.norm() * (1.0 + 1e-10), "cutoff {cutoff}");
    }
}

fn random_subset(r: &mut impl Rng, set: &IndexSet) -> IndexSet {
    let mode0: Vec<SparseModeIndex> = set.mode0.iter().filter(|_| r.gen_bool(0.4)).cloned().collect();
    let mode0 = if mode0.is_empty() { vec![set.mode0[0].clone()] } else { mode0 };
    let modes = set.modes.iter().map(|m| m[..r.gen_range(1..=m.len())].to_vec()).collect();
    ProductIndexSet::new(mode0, modes)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn prop_rayleigh_quotients_in_bounds(seed in 0u64..10_000) {
        let op = toy_op();
        let b = op.bounds();
        let mut r = rng(seed);
        let sub = random_subset(&mut r, &toy_set());
        let a = op.galerkin_block(&sub, None).to_dense();
        prop_assert!((&a - a.transpose()).abs().max() <= 1e-12 * a.abs().max().max(1.0));
        let x = DVector::from_fn(a.nrows(), |_, _| common::gauss(&mut r));
        let q = x.dot(&(&a * &x)) / x.dot(&x);
        prop_assert!(q >= b.gamma - 1e-12 && q <= b.big_gamma + 1e-12);
    }
}
