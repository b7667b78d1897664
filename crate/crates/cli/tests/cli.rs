use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dynatomic"));
    cmd.args(args).env_remove("DYNATOMIC_CACHE");
    if let Some(dir) = cache {
        cmd.env("DYNATOMIC_CACHE", dir);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn poly_phi_and_delta() {
    let o = run(&["poly", "--n", "2", "--which", "phi"], None);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "x: 1+c 1 1\n");
    let o = run(&["poly", "--n", "1", "--which", "delta"], None);
    assert_eq!(stdout(&o), "t: 4c -2 1\n");
    let o = run(&["poly", "--n", "5", "--which", "Delta:5", "--format", "json"], None);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["degree"], 11);
}

#[test]
fn bad_which_is_usage_error() {
    let o = run(&["poly", "--n", "2", "--which", "theta"], None);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn cache_round_trip_is_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let first = run(&["poly", "--n", "4", "--which", "Delta:4"], Some(dir.path()));
    let file = dir.path().join("m2").join("n4").join("Delta_4_4.txt");
    assert!(file.exists());
    assert_eq!(std::fs::read_to_string(&file).unwrap(), stdout(&first));
    let second = run(&["poly", "--n", "4", "--which", "Delta:4"], Some(dir.path()));
    assert_eq!(first.stdout, second.stdout);
    let leftovers: Vec<_> = std::fs::read_dir(file.parent().unwrap())
        .unwrap()
        .filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().ends_with(".tmp"))
        .collect();
    assert!(leftovers.is_empty());
}

#[test]
fn fibers_through_cache() {
    let dir = tempfile::tempdir().unwrap();
    let a = run(&["fibers", "--rows", "5:31"], Some(dir.path()));
    let b = run(&["fibers", "--rows", "5:31"], Some(dir.path()));
    let c = run(&["fibers", "--rows", "5:31"], None);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    assert!(dir.path().join("m2/n5/delta_nn_mod_31.txt").exists());
    assert!(stdout(&a).starts_with("n,p,rho0,"));
}

#[test]
fn classify_rows() {
    let o = run(&["classify", "--n", "7", "-p", "29"], None);
    let text = stdout(&o);
    assert!(text.starts_with("n,m,p,curve,reduction,irreducibility,rules\n"));
    assert!(text.contains("7,2,29,Y1,Good,"));
    let o = run(&["classify", "--n", "6", "--primes", "79"], None);
    assert!(stdout(&o).contains("6,2,79,Y1,Good,GeomIrreducible,resultant-only"));
}

#[test]
fn graph_verdict_and_determinism() {
    let a = run(&["graph", "--n", "5", "--robustness", "2"], None);
    let b = run(&["graph", "--n", "5", "--robustness", "2"], None);
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.ends_with("// connected under all 2-removals\n"));
    assert_eq!(text.matches("style=solid").count(), 11);
    assert_eq!(text.matches("style=dashed").count(), 3);
    let o = run(&["graph", "--n", "5", "--robustness", "4", "--format", "text"], None);
    assert!(stdout(&o).contains("disconnected by removing"));
}

#[test]
fn budget_abort_exit_code() {
    let o = run(&["graph", "--n", "6", "--budget", "3"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
}

#[test]
fn tables_text() {
    let o = run(&["tables", "--n", "3"], None);
    assert!(o.status.success());
    assert!(stdout(&o).contains("(1,3) |"));
}
