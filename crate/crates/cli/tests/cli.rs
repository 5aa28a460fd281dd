use serde_json::Value;
use std::process::{Command, Output};

fn tauber(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tauber")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

#[test]
fn theorem_check_pareto_one() {
    let out = tauber(&["theorem-check", "--dist", "pareto", "--r", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&out);
    assert_eq!(v["schema"], "v1");
    assert_eq!(v["command"], "theorem-check");
    let eta = v["report"]["eta_estimate"].as_f64().unwrap();
    assert!((eta + 1.0).abs() <= 0.05, "eta = {eta}");
    assert!(String::from_utf8_lossy(&out.stderr).contains("tolerance eta_error"));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(&path, r#"{"command":"bound","dist":"pareto","r":1,"sigma":2}"#).unwrap();
    let out = tauber(&["--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json_of(&out)["error"]["kind"], "config");
}

#[test]
fn missing_and_invalid_settings_exit_two() {
    assert_eq!(tauber(&["bound"]).status.code(), Some(2));
    assert_eq!(tauber(&["bound", "--dist", "pareto", "--r", "-1"]).status.code(), Some(2));
    assert_eq!(tauber(&["bound", "--dist", "zeta_diff", "--r", "1.5"]).status.code(), Some(2));
    assert_eq!(tauber(&["mg1", "--arrivals-mean", "1.3"]).status.code(), Some(2));
    assert_eq!(tauber(&[]).status.code(), Some(2));
}

#[test]
fn failed_tolerance_exits_three() {
    // A window too short to fit anything.
    let out = tauber(&["theorem-check", "--dist", "pareto", "--r", "1", "--x-min", "10", "--x-max", "12"]);
    assert!(matches!(out.status.code(), Some(2 | 3)));
    // A tolerance no estimate can meet.
    let out = tauber(&["theorem-check", "--dist", "pareto", "--r", "1", "--eta-tolerance", "1e-12"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json_of(&out)["pass"], false);
}

#[test]
fn flags_override_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(&path, r#"{"command":"analyze-dist","dist":"pareto","r":2,"points":5}"#).unwrap();
    let out = tauber(&["--config", path.to_str().unwrap(), "--r", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["config"]["r"], 1.0);
    assert_eq!(v["config"]["points"], 5);
    let slope = v["profile"][2]["slope"].as_f64().unwrap();
    assert!((slope + 1.0).abs() < 1e-9);
}

#[test]
fn seeded_runs_are_byte_identical() {
    let args = ["analyze-dist", "--dist", "zeta_diff", "--r", "2", "--samples", "5000", "--seed", "11"];
    let a = tauber(&args);
    let b = tauber(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = tauber(&["analyze-dist", "--dist", "zeta_diff", "--r", "2", "--samples", "5000", "--seed", "12"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn analyze_dist_csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tail.csv");
    let out = tauber(&[
        "analyze-dist", "--dist", "pareto", "--r", "0.5", "--points", "4", "--format", "csv", "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,tail,slope"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|f| f.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 4);
    for row in rows {
        assert!((row[1] - row[0].powf(-0.5)).abs() < 1e-14);
    }
}

#[test]
fn verify_lemmas_sign_suite() {
    let out = tauber(&["verify-lemmas", "--suite", "sign", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("suite,name,achieved,tolerance,pass\n"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn mg1_reports_without_full_vector() {
    let out = tauber(&["mg1", "--n", "2000", "--oracle-n", "200"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&out);
    assert!(v["report"].get("pi").is_none());
    assert!(v["oracle_max_norm"].as_f64().unwrap() < 1e-10);
}

#[test]
fn appendix_a2_limit() {
    let out = tauber(&["appendix", "--case", "a2", "--k", "2", "--power", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let last = v["sequence"].as_array().unwrap().last().unwrap()[1].as_f64().unwrap();
    assert!((last - 0.5).abs() < 1e-3);
}
