use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dicke-squeeze"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn sweep_csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let o = run(&[
        "sweep",
        "--omega-b",
        "1",
        "--g-min",
        "0",
        "--g-max",
        "2",
        "--points",
        "401",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let csv = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("# dicke-squeeze "));
    assert_eq!(
        lines[3],
        "g_over_omega_a,phase,a_bar,b_bar,omega_minus,omega_plus,var_min,var_max,product,var_photon,theta_opt,psi_opt,phi_opt,route_delta"
    );
    assert_eq!(lines.len(), 4 + 401);
    let crit: Vec<&str> = lines[4 + 100].split(',').collect();
    assert_eq!(crit[0], "0.5");
    assert_eq!(
        (crit[1], crit[6], crit[7], crit[8]),
        ("critical", "0", "inf", "")
    );
}

#[test]
fn sweep_is_byte_identical() {
    let a = run(&["sweep", "--omega-b", "2", "--points", "201"]);
    let b = run(&["sweep", "--omega-b", "2", "--points", "201"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sweep_json() {
    let o = run(&["sweep", "--points", "5", "--g-max", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let recs = v["records"].as_array().unwrap();
    assert_eq!(recs.len(), 5);
    assert_eq!(recs[0]["var_min"], 0.25);
    assert_eq!(recs[2]["var_max"], "inf");
}

#[test]
fn invalid_sweeps_exit_2() {
    assert_eq!(
        run(&["sweep", "--g-min", "1", "--g-max", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["sweep", "--points", "1"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--omega-a", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_3() {
    let o = run(&[
        "sweep",
        "--points",
        "3",
        "--output",
        "/nonexistent-dir/x.csv",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["point", "--g", "0.3", "--config", "/nonexistent-dir/c.json"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn point_reports() {
    let o = run(&["point", "--omega-a", "1", "--omega-b", "1", "--g", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["phase"], "critical");
    assert_eq!(v["squeezing"]["var_min"], 0.0);
    assert_eq!(v["squeezing"]["var_max"], "inf");

    let o = run(&["point", "--g", "0.3"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["squeezing"]["var_min"].as_f64().unwrap() - 0.158114).abs() < 1e-6);
    assert!((v["squeezing"]["product"].as_f64().unwrap() - 0.25).abs() < 1e-12);

    let o = run(&["point", "--omega-b", "2", "--g", "0.2"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["squeezing"]["product"].as_f64().unwrap() - 0.25).abs() < 1e-9);
    assert!(v["route_delta"].as_f64().unwrap() < 1e-10);

    assert_eq!(run(&["point", "--g", "-0.1"]).status.code(), Some(2));
    assert_eq!(run(&["point"]).status.code(), Some(2));
}

#[test]
fn config_file_supplies_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"omega-b": 2.0, "g": 0.2}"#).unwrap();
    let o = run(&["point", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["omega_b"], 2.0);

    let o = run(&["point", "--config", cfg.to_str().unwrap(), "--g", "0.1"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["g"], 0.1);

    std::fs::write(&cfg, r#"{"bogus": 1}"#).unwrap();
    assert_eq!(
        run(&["point", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn oracle_ed_runs() {
    let o = run(&[
        "oracle-ed",
        "--g",
        "0.3",
        "--n-atoms",
        "8",
        "--photon-cutoff",
        "30",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["gap"].as_f64().unwrap() < 0.01);
    assert_eq!(run(&["oracle-ed", "--g", "0.8"]).status.code(), Some(2));
    assert_eq!(
        run(&[
            "oracle-ed",
            "--g",
            "0.3",
            "--n-atoms",
            "5000",
            "--photon-cutoff",
            "100"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn selfcheck_quick_and_negative_control() {
    let o = run(&["selfcheck", "--quick"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains(" ed_"));
    let o = run(&["selfcheck", "--quick", "--perturb-sigma", "1e-3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL purity"));
}

#[test]
fn selfcheck_full() {
    let o = run(&["selfcheck", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["outcomes"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["name"] == "ed_convergence_trend"));
}

#[test]
fn help_exits_0() {
    assert!(Path::new(env!("CARGO_BIN_EXE_dicke-squeeze")).exists());
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
