use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn oscillint(args: &[&str], config: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oscillint"))
        .args(args)
        .arg("--config")
        .arg(config)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, name: &str, json: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    fs::write(&path, json).unwrap();
    path
}

const HARMONIC: &str = r#"{"equation": {"a": "1", "b": "0", "c": "1", "d": "sin(t)"}, "horizon": 30}"#;

#[test]
fn reduce_prints_the_system() {
    let dir = tempfile::tempdir().unwrap();
    let out = oscillint(&["reduce"], &write_config(dir.path(), "c.json", HARMONIC));
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for line in [
        "details.system.p = 0",
        "details.system.q = 1",
        "details.system.r = -1",
        "details.system.s = 0",
        "details.system.f = 0",
        "details.system.g = sin(t)",
    ] {
        assert!(text.contains(line), "{line} missing from\n{text}");
    }
}

#[test]
fn wong_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = oscillint(&["wong"], &write_config(dir.path(), "c.json", HARMONIC));
    assert_eq!(out.status.code(), Some(10));
    let damped = r#"{"equation": {"a": "1", "b": "0.1", "c": "1", "d": "sin(t)"}, "horizon": 30}"#;
    let out = oscillint(&["wong"], &write_config(dir.path(), "d.json", damped));
    assert_eq!(out.status.code(), Some(30));
}

#[test]
fn report_files_agree_with_exit_code_and_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "c.json", HARMONIC);
    let report = dir.path().join("report.txt");
    let args = ["analyze", "--out", report.to_str().unwrap()];
    let out = oscillint(&args, &config);
    assert_eq!(out.status.code(), Some(10));
    let text = fs::read_to_string(&report).unwrap();
    assert_eq!(text, String::from_utf8(out.stdout).unwrap());
    let json_path = dir.path().join("report.txt.json");
    let first = fs::read_to_string(&json_path).unwrap();
    let value: Value = serde_json::from_str(&first).unwrap();
    assert_eq!(value["exit_code"], 10);
    assert_eq!(value["verdict"]["outcome"], "oscillatory");
    assert!(text.contains("verdict.outcome = oscillatory"));

    // rerunning from the echoed configuration reproduces the report
    let echoed = serde_json::to_string(&value["provenance"]["config"]).unwrap();
    let config2 = write_config(dir.path(), "echo.json", &echoed);
    let report2 = dir.path().join("again.txt");
    oscillint(&["analyze", "--out", report2.to_str().unwrap()], &config2);
    assert_eq!(fs::read_to_string(dir.path().join("again.txt.json")).unwrap(), first);
}

#[test]
fn overrides_reach_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "c.json", HARMONIC);
    let report = dir.path().join("r.txt");
    let tau = std::f64::consts::TAU.to_string();
    let out = oscillint(
        &["analyze", "--horizon", "40", "--periodic", &tau, "--out", report.to_str().unwrap()],
        &config,
    );
    assert_eq!(out.status.code(), Some(10));
    let value: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("r.txt.json")).unwrap()).unwrap();
    assert_eq!(value["provenance"]["config"]["horizon"], 40.0);
    assert_eq!(value["verdict"]["evidence"]["periodic"], std::f64::consts::TAU);
}

#[test]
fn oracle_dumps_csv_traces() {
    let dir = tempfile::tempdir().unwrap();
    let traces = dir.path().join("traces");
    let out = oscillint(
        &["oracle", "--dump-traces", traces.to_str().unwrap()],
        &write_config(dir.path(), "c.json", HARMONIC),
    );
    assert_eq!(out.status.code(), Some(0));
    let files: Vec<_> = fs::read_dir(&traces).unwrap().collect();
    assert_eq!(files.len(), 16);
    let first = fs::read_to_string(traces.join("member_00.csv")).unwrap();
    assert!(first.starts_with("t,phi,psi\n"));
    assert!(!first.contains('\r'));
    let row = first.lines().nth(1).unwrap();
    assert_eq!(row, "0.0000000000000000e0,1.0000000000000000e0,0.0000000000000000e0");
}

#[test]
fn compare_and_sweep_run() {
    let dir = tempfile::tempdir().unwrap();
    let cmp = r#"{
        "comparison": {
            "first": {"f": "1", "g": "0", "h": "1"},
            "second": {"f": "1", "g": "0", "h": "2"},
            "y2_start": 0.0
        },
        "horizon": 1
    }"#;
    let config = write_config(dir.path(), "cmp.json", cmp);
    let report = dir.path().join("cmp.txt");
    for flags in [vec![], vec!["--squared-variant"]] {
        let mut args = vec!["compare", "--out", report.to_str().unwrap()];
        args.extend(flags.iter().copied());
        let out = oscillint(&args, &config);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let value: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("cmp.txt.json")).unwrap()).unwrap();
        assert_eq!(value["details"]["validation"]["passed"], true);
        assert_eq!(value["certificates"]["squared_variant"], !flags.is_empty());
    }

    let sys = r#"{"system": {"p": "0", "q": "1", "r": "1", "s": "0", "g": "-exp(-t)"}, "horizon": 10,
                  "lambda": {"values": [0.5, 1.0, 2.0]}}"#;
    let report = dir.path().join("sweep.txt");
    let out = oscillint(&["sweep", "--out", report.to_str().unwrap()], &write_config(dir.path(), "s.json", sys));
    assert_eq!(out.status.code(), Some(0));
    let value: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("sweep.txt.json")).unwrap()).unwrap();
    let feasible: Vec<bool> = value["details"]["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["feasible"].as_bool().unwrap())
        .collect();
    assert_eq!(feasible, vec![false, true, true]);
}

#[test]
fn riccati_reports_escape() {
    let dir = tempfile::tempdir().unwrap();
    let json = r#"{"riccati": {"f": "1", "g": "0", "h": "1", "y0": 0}, "horizon": 3}"#;
    let out = oscillint(&["riccati"], &write_config(dir.path(), "r.json", json));
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text.lines().find(|l| l.starts_with("details.escape_time = ")).unwrap();
    let t: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!((t - std::f64::consts::FRAC_PI_2).abs() < 1e-4);
}

#[test]
fn errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let both = r#"{"equation": {"a": "1", "c": "1"}, "system": {"p": "0", "q": "1", "r": "-1", "s": "0"}, "horizon": 5}"#;
    let out = oscillint(&["analyze"], &write_config(dir.path(), "b.json", both));
    assert_eq!(out.status.code(), Some(1));
    let bad = r#"{"system": {"p": "0", "q": "1 * (", "r": "-1", "s": "0"}, "horizon": 5}"#;
    let out = oscillint(&["analyze"], &write_config(dir.path(), "bad.json", bad));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("system.q"));
    let out = oscillint(&["analyze"], &dir.path().join("missing.json"));
    assert_eq!(out.status.code(), Some(1));
    let out = oscillint(&["frobnicate"], &write_config(dir.path(), "h.json", HARMONIC));
    assert_eq!(out.status.code(), Some(1));
    let out = oscillint(&["reduce"], &write_config(dir.path(), "s.json", r#"{"system": {"p": "0", "q": "1", "r": "-1", "s": "0"}, "horizon": 5}"#));
    assert_eq!(out.status.code(), Some(1));
}
