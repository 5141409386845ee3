use htpde::bench::*;
use htpde::oracle::fixtures::toy_field;
use htpde::problem::CoefficientField;
use htpde::tensor::DimensionTree;
use htpde::BenchError;
use proptest::prelude::*;
use std::io::Write;
use std::path::Path;

fn toy_config(dir: &Path, schedule: Vec<f64>) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(toy_field());
    c.eps_schedule = Some(schedule);
    c.out_dir = dir.to_path_buf();
    c
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn fit_recovers_power_law() {
    let x: Vec<f64> = (1..=8).map(|i| 10f64.powi(i)).collect();
    let y: Vec<f64> = x.iter().map(|v| v.powi(-2)).collect();
    assert!((fit_slope(&x, &y).unwrap() + 2.0).abs() < 1e-9);
    let c = vec![3.5; 8];
    assert!(fit_slope(&x, &c).unwrap().abs() < 1e-12);
    assert!(matches!(fit_slope(&x[..2], &y[..2]), Err(BenchError::DegenerateWindow(_))));
    assert!(matches!(fit_slope(&[2.0; 5], &[1.0, 2.0, 3.0, 4.0, 5.0]), Err(BenchError::DegenerateWindow(_))));
}

#[test]
fn fit_rate_reads_trailing_window() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(f, "n,err").unwrap();
    writeln!(f, "0,1").unwrap();
    for i in 1..=6 {
        let n = 2f64.powi(i);
        let e = if i <= 2 { 1.0 } else { n.powf(-1.5) };
        writeln!(f, "{n},{e}").unwrap();
    }
    drop(f);
    let s = fit_rate(&path, "n", "err", 4).unwrap();
    assert!((s + 1.5).abs() < 1e-9, "slope {s}");
    assert!(matches!(fit_rate(&path, "n", "err", 2), Err(BenchError::DegenerateWindow(_))));
    assert!(matches!(fit_rate(&path, "n", "err", 7), Err(BenchError::DegenerateWindow(_))));
    assert!(matches!(fit_rate(&path, "n", "missing", 3), Err(BenchError::Config(_))));
}

#[test]
fn single_target_gives_single_log_row() {
    let dir = tempfile::tempdir().unwrap();
    let s = run_experiment(&toy_config(dir.path(), vec![1e-1])).unwrap();
    assert!(s.converged());
    let log = read(dir.path(), "run_log.csv");
    assert_eq!(log.lines().count(), 2, "{log}");
    assert!(log.starts_with("target_eps,k,eps_k,"));
    for name in ["config.json", "trace.csv", "dofs.csv", "ops.csv", "sv_dump.csv"] {
        assert!(dir.path().join(name).is_file(), "{name}");
    }
    let echoed: ExperimentConfig = serde_json::from_str(&read(dir.path(), "config.json")).unwrap();
    assert_eq!(echoed, toy_config(dir.path(), vec![1e-1]));
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_experiment(&toy_config(a.path(), vec![1e-1, 1e-3])).unwrap();
    run_experiment(&toy_config(b.path(), vec![1e-1, 1e-3])).unwrap();
    for name in ["trace.csv", "run_log.csv", "dofs.csv", "ops.csv", "sv_dump.csv"] {
        assert_eq!(read(a.path(), name), read(b.path(), name), "{name}");
    }
    assert_eq!(read(a.path(), "run_log.csv").lines().count(), 3);
}

#[test]
fn empty_schedule_writes_empty_tables() {
    let dir = tempfile::tempdir().unwrap();
    let s = run_experiment(&toy_config(dir.path(), vec![])).unwrap();
    assert!(s.trace.rows.is_empty());
    assert_eq!(read(dir.path(), "run_log.csv").lines().count(), 1);
    let (_, _, rows) = compare_formats(&toy_config(dir.path(), vec![]), &dir.path().join("cmp")).unwrap();
    assert!(rows.is_empty());
    assert_eq!(read(&dir.path().join("cmp"), "comparison.csv").lines().count(), 1);
}

#[test]
fn identical_runs_compare_to_zero_deltas() {
    let dir = tempfile::tempdir().unwrap();
    let a = run_experiment(&toy_config(&dir.path().join("a"), vec![1e-1, 1e-2])).unwrap();
    let b = run_experiment(&toy_config(&dir.path().join("b"), vec![1e-1, 1e-2])).unwrap();
    let rows = compare_runs(&a, &b).unwrap();
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert_eq!(r.a, r.b);
        assert_eq!(r.max_rank_delta(), 0);
    }
}

#[test]
fn full_format_mode0_is_spatial_only() {
    let dir = tempfile::tempdir().unwrap();
    let c = toy_config(dir.path(), vec![1e-2]).with_format(TensorFormat::Full);
    assert_eq!(c.field().j_split, toy_field().num_params());
    let op = c.validate().unwrap();
    let p = htpde::solver::SolverParams { eps: 1e-2, ..Default::default() };
    let out = htpde::solver::adaptive_solve(&op, &c.problem.rhs, &p, &Default::default()).unwrap();
    assert!(out.converged());
    assert!(out.lambda.mode0.iter().all(|x| x.nu.is_zero()));
    assert_eq!(out.lambda.j(), 4);
}

#[test]
fn uncertified_run_keeps_partial_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = toy_config(dir.path(), vec![1e-4]);
    c.solver.outer_cap = 1;
    match run_experiment(&c) {
        Err(BenchError::NotCertified(msg)) => assert!(msg.contains("cap"), "{msg}"),
        other => panic!("expected NotCertified, got {other:?}"),
    }
    assert_eq!(read(dir.path(), "trace.csv").lines().count(), 3);
    assert_eq!(read(dir.path(), "run_log.csv").lines().count(), 1);
}

#[test]
fn invalid_config_fails_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = toy_config(&dir.path().join("never"), vec![1e-2]);
    c.solver.alpha = 0.99;
    assert!(matches!(run_experiment(&c), Err(BenchError::Config(_))));
    assert!(!dir.path().join("never").exists());
    let c = ExperimentConfig::new(CoefficientField { c1: 0.95, c2: 0.95, alpha_decay: 0.1, ..CoefficientField::ci() });
    assert!(matches!(c.validate(), Err(BenchError::Problem(_))));
}

proptest! {
    #[test]
    fn prop_cost_model_monotone_in_ranks(j in 1usize..=5, seed in 0u64..1000, bump in 0usize..64) {
        let tree = DimensionTree::linear(j);
        let n = tree.num_nodes();
        let mut s = seed;
        let mut next = || { s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); (s >> 33) as usize };
        let lens: Vec<usize> = (0..=j).map(|_| 1 + next() % 50).collect();
        let ranks: Vec<usize> = (0..n).map(|id| if id == 0 { 1 } else { 1 + next() % 6 }).collect();
        let base = orthogonalization_cost(&tree, &lens, &ranks);
        let node = 1 + bump % (n - 1);
        let mut up = ranks.clone();
        up[node] += 1;
        prop_assert!(orthogonalization_cost(&tree, &lens, &up) > base);
    }
}
