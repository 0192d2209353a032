use std::process::Command;

fn nlbm(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_nlbm")).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn validation_errors_exit_with_two() {
    let (code, _, err) = nlbm(&["resolvent", "--process", "bullet"]);
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("seed"));
    let (code, _, _) = nlbm(&["resolvent", "--seed", "1", "--nu", "1.5"]);
    assert_eq!(code, 2);
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "experiment = \"pde\"\nlambdas = [1.0]\n").unwrap();
    let (code, _, err) = nlbm(&["pde", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("lambdas"));
    let (code, _, _) = nlbm(&["resolvent", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 2);
}

#[test]
fn interface_grid_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.csv");
    std::fs::write(&grid, "nu,alpha,lambda,f,eta\n0.4,0.5,2.0,gaussian:center=0.3,\n0.6,0.4,1.0,exp_decay:c=1,0.5\n").unwrap();
    let csv = dir.path().join("rows.csv");
    let out = dir.path().join("report.json");
    let (code, _, err) = nlbm(&[
        "verify",
        "--suite",
        "interface",
        "--grid",
        grid.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(rows.lines().count(), 3, "{rows}");
    assert!(rows.lines().nth(1).unwrap().starts_with("skew,"));
    assert!(rows.lines().nth(2).unwrap().starts_with("sticky,"));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["checks"].as_array().unwrap().len(), 2);
    // Only the renamed outputs remain in the directory.
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 3);
}

#[test]
fn operator_and_pde_reports() {
    let (code, json, err) = nlbm(&["operator", "--operator", "marchaud", "--u", "exp:c=-1", "--x", "0.5", "--symbol", "stable:alpha=0.5"]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let value = v["results"][0]["value"].as_f64().unwrap();
    assert!((value - (-0.5f64).exp()).abs() < 1e-8);

    let (code, json, err) = nlbm(&["pde", "--process", "skew-sticky", "--f", "gaussian", "--t", "0.5", "--x", "0.2,-0.2"]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["results"].as_array().unwrap().len(), 2);
    assert!(v["results"][0]["components"]["trace_error"].as_f64().unwrap() < 1e-3);
}

#[test]
fn simulate_writes_paths() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("paths.csv");
    let (code, json, err) = nlbm(&[
        "simulate", "--process", "bullet", "--seed", "3", "--n-paths", "4", "--horizon", "0.1", "--csv", csv.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(json.contains("end_mean"));
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(rows.lines().count(), 1 + 4 * 101);
}

#[test]
fn mismatched_experiment_is_rejected() {
    let (code, _, err) = nlbm(&["verify"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn noisy_estimates_are_inconclusive() {
    let (code, _, err) = nlbm(&["resolvent", "--process", "skew", "--seed", "5", "--n-paths", "50", "--max-se", "1e-9"]);
    assert_eq!(code, 4, "{err}");
    assert!(err.contains("INCONCLUSIVE"));
}
