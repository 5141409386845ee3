use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn htpde(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_htpde")).args(args).output().expect("spawn htpde")
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn solve_toy_config_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let cfg = configs().join("toy.toml");
    let o = htpde(&["solve", "--config", cfg.to_str().unwrap(), "--eps", "1e-2", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["config.json", "config_source.toml", "trace.csv", "run_log.csv", "dofs.csv", "ops.csv", "sv_dump.csv"] {
        assert!(out.join(name).is_file(), "{name}");
    }
    let log = std::fs::read_to_string(out.join("run_log.csv")).unwrap();
    assert_eq!(log.lines().count(), 2);
}

#[test]
fn iteration_cap_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("capped.toml");
    let text = std::fs::read_to_string(configs().join("toy.toml")).unwrap();
    std::fs::write(&cfg, format!("{text}\n[solver]\nouter_cap = 1\n")).unwrap();
    let out = dir.path().join("run");
    let o = htpde(&["solve", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("trace.csv").is_file());
    assert!(String::from_utf8_lossy(&o.stderr).contains("not certified"));
}

#[test]
fn bad_config_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"problem": {"mean": 1.0}}"#).unwrap();
    assert_eq!(code(&htpde(&["solve", "--config", cfg.to_str().unwrap()])), 1);
    let missing = dir.path().join("missing.toml");
    assert_eq!(code(&htpde(&["solve", "--config", missing.to_str().unwrap()])), 1);
    let text = std::fs::read_to_string(configs().join("toy.toml")).unwrap().replace("c1 = 0.3", "c1 = 0.99");
    std::fs::write(dir.path().join("nonelliptic.toml"), text).unwrap();
    let o = htpde(&["solve", "--config", dir.path().join("nonelliptic.toml").to_str().unwrap()]);
    assert_eq!(code(&o), 1);
}

#[test]
fn oracle_regenerates_checked_in_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fixtures.json");
    let o = htpde(&["oracle", "--fixtures", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let frozen = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/oracle_fixtures.json");
    assert_eq!(std::fs::read_to_string(path).unwrap(), std::fs::read_to_string(frozen).unwrap());
}

#[test]
fn fit_prints_slope() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let rows: String = (1..=5).map(|i| format!("{},{}\n", 10f64.powi(i), 10f64.powi(-i))).collect();
    std::fs::write(&path, format!("n,err\n{rows}")).unwrap();
    let o = htpde(&["fit", "--csv", path.to_str().unwrap(), "--x", "n", "--y", "err", "--window", "3"]);
    assert_eq!(code(&o), 0);
    let slope: f64 = String::from_utf8_lossy(&o.stdout).trim().parse().unwrap();
    assert!((slope + 1.0).abs() < 1e-9);
    let o = htpde(&["fit", "--csv", path.to_str().unwrap(), "--x", "n", "--y", "err", "--window", "2"]);
    assert_eq!(code(&o), 1);
}
