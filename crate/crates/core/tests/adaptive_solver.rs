mod common;

use common::{expand_instance, random_htensor_on, rng};
use htpde::oracle::fixtures::{toy_field, toy_set, toy_universe, universe_set};
use htpde::oracle::{best_product_set_bruteforce, dense_galerkin_solve, DenseProblem};
use htpde::problem::*;
use htpde::solver::*;
use htpde::tensor::{HTensor, ProductIndexSet};
use htpde::SolverError;
use proptest::prelude::*;

fn toy_op() -> ParametricOperator {
    ParametricOperator::new(toy_field(), toy_universe()).unwrap()
}

fn one() -> RhsSource {
    RhsSource::Constant(1.0)
}

#[test]
fn st_solve_zero_rhs_returns_zero() {
    let op = toy_op();
    let set = toy_set();
    let f: SolutionTensor = HTensor::zero(op.tree(), set.clone());
    let out = st_solve(&op, &f, &set, 1e-6, &SolverParams::default(), &StSolveOptions::default()).unwrap();
    assert!(out.w.is_zero());
    assert_eq!(out.iterations, 0);
}

#[test]
fn st_solve_rejects_bad_input() {
    let op = toy_op();
    let set = toy_set();
    let f = rhs_on(&op, &one(), &set);
    let p = SolverParams::default();
    assert!(matches!(st_solve(&op, &f, &set, 0.0, &p, &StSolveOptions::default()), Err(SolverError::Inadmissible(_))));
    let small: IndexSet = ProductIndexSet::new(vec![SparseModeIndex::spatial(SpatialIndex::root())], vec![vec![0], vec![0]]);
    assert!(st_solve(&op, &f, &small, 1e-3, &p, &StSolveOptions::default()).is_err());
    let capped = SolverParams { inner_cap: 1, ..SolverParams::default() };
    assert!(matches!(
        st_solve(&op, &f, &set, 1e-10, &capped, &StSolveOptions::default()),
        Err(SolverError::IterationCap { cap: 1, .. })
    ));
}

#[test]
fn st_solve_close_to_dense_galerkin_solution() {
    let op = toy_op();
    let set = toy_set();
    let problem = DenseProblem::assemble(op.field(), &one(), &set).unwrap();
    let u = dense_galerkin_solve(&problem).unwrap();
    let f = rhs_on(&op, &one(), &set);
    let gamma = op.bounds().gamma;
    for eps in [1e-2, 1e-4] {
        let out = st_solve(&op, &f, &set, eps, &SolverParams::default(), &StSolveOptions::default()).unwrap();
        assert!(out.w.support().is_subset(&set));
        let w = problem.vector_of(&out.w.embed(&set)).unwrap();
        let res = (problem.apply(&w) - &problem.rhs).norm();
        assert!(res <= eps * (1.0 + 1e-10), "eps {eps}: residual {res:e}");
        assert!((&w - &u).norm() <= eps / gamma + 1e-8);
    }
}

#[test]
fn zero_threshold_is_plain_richardson() {
    let op = toy_op();
    let set = toy_set();
    let problem = DenseProblem::assemble(op.field(), &one(), &set).unwrap();
    let u = dense_galerkin_solve(&problem).unwrap();
    let f = rhs_on(&op, &one(), &set);
    let opts = StSolveOptions { frozen_tau: Some(0.0), record_iterates: true };
    let out = st_solve(&op, &f, &set, 1e-6, &SolverParams::default(), &opts).unwrap();
    let rho = op.bounds().rho;
    let errs: Vec<f64> = out.iterates.iter().map(|w| (problem.vector_of(&w.embed(&set)).unwrap() - &u).norm()).collect();
    for pair in errs.windows(2) {
        assert!(pair[1] <= rho * pair[0] + 1e-12, "{} > rho * {}", pair[1], pair[0]);
    }
}

#[test]
fn frozen_threshold_fixed_point_bound() {
    let op = toy_op();
    let set = toy_set();
    let problem = DenseProblem::assemble(op.field(), &one(), &set).unwrap();
    let u = dense_galerkin_solve(&problem).unwrap();
    let u_t = HTensor::from_dense(op.tree(), set.clone(), &htpde::tensor::DenseTensor::from_vec(set.mode_lens(), u.as_slice().to_vec()).unwrap()).unwrap();
    let f = rhs_on(&op, &one(), &set);
    let rho = op.bounds().rho;
    for tau in [0.01, 0.1] {
        let (w, _) = st_fixed_point(&op, &f, &set, tau, 1e-14, 10_000).unwrap();
        let lhs = (problem.vector_of(&w.embed(&set)).unwrap() - &u).norm();
        let rhs = u_t.soft_threshold(tau).sub(&u_t).unwrap().norm() / (1.0 - rho);
        assert!(lhs <= rhs + 1e-8, "tau {tau}: {lhs:e} > {rhs:e}");
    }
}

#[test]
fn res_approx_of_zero_is_minus_rhs() {
    let op = toy_op();
    let lambda: IndexSet = ProductIndexSet::empty(2);
    let w: SolutionTensor = HTensor::zero(op.tree(), lambda.clone());
    let r = res_approx(&op, &one(), &w, &lambda, 0.05).unwrap();
    let f = assemble_rhs(&op, &one(), r.rhs_level);
    assert!(f.support().is_subset(&r.rows));
    let diff = r.r.add(&f.embed(&r.rows)).unwrap().norm();
    assert!(diff < 1e-14);
    assert!(r.bound() <= r.xi);
}

#[test]
fn res_approx_parametric_rows_grow_by_one() {
    let op = toy_op();
    let lambda: IndexSet = ProductIndexSet::new(vec![SparseModeIndex::spatial(SpatialIndex::root())], vec![vec![0], vec![0]]);
    let w = rhs_on(&op, &one(), &lambda);
    let r = res_approx(&op, &one(), &w, &lambda, 1e-3).unwrap();
    assert_eq!(r.rows.modes, vec![vec![0, 1], vec![0, 1]]);
}

#[test]
fn res_approx_certified_against_full_universe() {
    let op = toy_op();
    let uni = universe_set(op.field(), op.universe());
    let problem = DenseProblem::assemble(op.field(), &one(), &uni).unwrap();
    let mut g = rng(3);
    let lambda = toy_set();
    for xi in [1e-1, 1e-2, 1e-4] {
        let w = random_htensor_on(&mut g, lambda.clone(), 2).scale(0.1);
        let r = res_approx(&op, &one(), &w, &lambda, xi).unwrap();
        assert!(r.rows.is_subset(&uni));
        let exact = problem.apply(&problem.vector_of(&w.embed(&uni)).unwrap()) - &problem.rhs;
        let approx = problem.vector_of(&r.r.embed(&uni)).unwrap();
        let err = (exact - approx).norm();
        assert!(err <= xi, "xi {xi:e}: error {err:e}");
        assert!(err <= r.bound() * (1.0 + 1e-9) + 1e-12);
    }
}

#[test]
fn expand_trivial_cases() {
    let mut g = rng(1);
    let (r, _, tilde) = expand_instance(&mut g);
    let out = expand(&r, &tilde, &tilde, 0.5).unwrap();
    assert_eq!(out.set, tilde);
    assert_eq!(out.m, 0);
    let out = expand(&r, &ProductIndexSet::new(vec![tilde.mode0[0].clone()], vec![vec![0], vec![0]]), &tilde, 1.0 - 1e-13).unwrap();
    assert_eq!(out.set, tilde);
    let z: SolutionTensor = HTensor::zero(r.tree_arc(), tilde.clone());
    assert!(matches!(expand(&z, &tilde, &tilde, 0.5), Err(SolverError::ZeroResidual)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn prop_expand_within_optimum_plus_j(seed in 0u64..100_000, alpha in 0.2f64..0.95) {
        let mut g = rng(seed);
        let (r, lambda, tilde) = expand_instance(&mut g);
        let out = expand(&r, &lambda, &tilde, alpha).unwrap();
        prop_assert!(lambda.is_subset(&out.set) && out.set.is_subset(&tilde));
        prop_assert!(r.restrict(&out.set).norm() >= alpha * r.norm() * (1.0 - 1e-12));
        let best = best_product_set_bruteforce(&r, &lambda, &tilde, alpha).unwrap();
        prop_assert!(out.set.added_count(&lambda) <= best.added_count(&lambda) + 2);
    }
}

#[test]
fn adaptive_accepts_zero_when_target_above_rhs_norm() {
    let op = toy_op();
    let p = SolverParams { eps: 0.5, ..SolverParams::default() };
    let out = adaptive_solve(&op, &one(), &p, &AdaptiveOptions::default()).unwrap();
    assert!(out.converged() && out.u.is_zero());
}

#[test]
fn adaptive_matches_dense_solution_on_capped_universe() {
    let op = toy_op();
    let uni = universe_set(op.field(), op.universe());
    let problem = DenseProblem::assemble(op.field(), &one(), &uni).unwrap();
    let u = dense_galerkin_solve(&problem).unwrap();
    let eps = 1e-5;
    let p = SolverParams { eps, ..SolverParams::default() };
    let out = adaptive_solve(&op, &one(), &p, &AdaptiveOptions { keep_iterates: true }).unwrap();
    assert!(out.converged());
    let last = out.trace.last().unwrap();
    assert!(last.eps_k <= eps);
    let v = problem.vector_of(&out.u.embed(&uni)).unwrap();
    assert!((&v - &u).norm() <= eps / op.bounds().gamma + 1e-8);
    for pair in out.iterates.windows(2) {
        let (a, b) = (&pair[0].0, &pair[1].0);
        assert!(a.is_subset(b) && a != b, "sets must grow strictly");
    }
}

#[test]
fn trace_csv_layout() {
    let op = toy_op();
    let p = SolverParams { eps: 1e-2, ..SolverParams::default() };
    let out = adaptive_solve(&op, &one(), &p, &AdaptiveOptions::default()).unwrap();
    let mut buf = Vec::new();
    out.trace.write_csv(&mut buf, 2).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "k,eps_k,xi,norm_r,inner_iters,dofs_mode_0,dofs_mode_1,dofs_mode_2,max_rank,ranks_per_edge"
    );
    assert_eq!(lines.count(), out.trace.rows.len());
    let mut json = Vec::new();
    out.trace.write_json(&mut json).unwrap();
    let v: serde_json::Value = serde_json::from_slice(&json).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), out.trace.rows.len());
}
