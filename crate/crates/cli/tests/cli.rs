use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_flowembed"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).expect("valid json")
}

#[test]
fn params_prints_the_default_record() {
    let out = run(&["params"]);
    assert!(out.status.success());
    let p = json(&out.stdout);
    assert_eq!(p["r1"].as_f64(), Some(2f64.powi(-8)));
    assert_eq!(p["b"].as_f64(), Some(2.4));
    assert_eq!(p["E"].as_f64(), Some(512.0));
    assert_eq!(p["H"].as_f64(), Some(676.0));
    assert!((p["M2"].as_f64().unwrap() - 0.1994).abs() < 5e-5);
}

#[test]
fn validate_reports_the_marker_gap_check() {
    let out = run(&["params", "--validate"]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out.stdout);
    let failing: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failing, ["M2 > 4L + E + 1"]);
}

#[test]
fn bad_parameters_exit_with_config_code() {
    let out = run(&["params", "--delta", "-1"]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn periodic_tiling_matches_golden() {
    let marker = fixture("periodic_marker.json");
    let out = run(&["tile", "--marker", marker.to_str().unwrap()]);
    assert!(out.status.success());
    let golden = fs::read_to_string(fixture("periodic_tiling.json")).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden);

    let tiling = json(golden.as_bytes());
    let cell = |n: i64| tiling["cells"][n.to_string()].as_array().map(|c| (c[0].as_f64().unwrap(), c[1].as_f64().unwrap()));
    for n in [-20, -10, 0] {
        let (l, r) = cell(n).unwrap();
        let (l2, r2) = cell(n + 20).unwrap();
        assert!((l2 - l - 20.0).abs() < 1e-9 && (r2 - r - 20.0).abs() < 1e-9);
    }
}

#[test]
fn tile_report_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let svg = dir.path().join("tiling.svg");
    let out = run(&[
        "tile",
        "--seed",
        "11",
        "--out",
        dir.path().join("tiling.json").to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
        "--plot",
        svg.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&fs::read(&report).unwrap())["pass"], true);
    assert!(fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}

#[test]
fn missing_marker_is_an_io_error() {
    let out = run(&["tile", "--marker", "/nonexistent/marker.json"]);
    assert_eq!(out.status.code(), Some(2));
    let err = json(&out.stderr);
    assert_eq!(err["error"], "io");
    assert_eq!(err["exit_code"], 2);
}

#[test]
fn malformed_marker_is_a_json_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{\"lo\": 0").unwrap();
    let out = run(&["tile", "--marker", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out.stderr)["error"], "json");
}

#[test]
fn verify_all_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let paths = [dir.path().join("a.json"), dir.path().join("b.json")];
    for p in &paths {
        let out = run(&["verify-all", "--seed", "3", "--suite", "1", "--suite", "6", "--out", p.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = fs::read(&paths[0]).unwrap();
    assert_eq!(a, fs::read(&paths[1]).unwrap());
    let report = json(&a);
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["suites"].as_array().unwrap().len(), 2);
}

#[test]
fn unknown_suite_is_rejected() {
    let out = run(&["verify-all", "--suite", "9"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn flow_simulate_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("traj.csv");
    let out = run(&["flow", "simulate", "--system", "solenoid:3", "--t-max", "2", "--dt", "0.5", "--csv", csv.to_str().unwrap()]);
    assert!(out.status.success());
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,x1,x2,x3");
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[3], "1,0,1,1");
}

#[test]
fn flow_return_on_s2() {
    let out = run(&["flow", "return", "--system", "solenoid:4", "--section", "2"]);
    assert!(out.status.success());
    let r = json(&out.stdout);
    assert_eq!(r["result"]["time"].as_f64(), Some(2.0));
    assert_eq!(r["result"]["orbit_length"].as_u64(), Some(12));
}

#[test]
fn suspend_embed_rejects_non_unit_roof() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("system.json");
    fs::write(&path, r#"{"perm": [1, 2, 0], "roof": [1.0, 0.5, 2.0]}"#).unwrap();
    let spec = format!("suspension:{}", path.display());
    let out = run(&["flow", "suspend-embed", "--system", &spec]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out.stderr)["error"], "flow");

    let out = run(&["flow", "return", "--system", &spec]);
    assert!(out.status.success());
    assert_eq!(json(&out.stdout)["result"]["orbit_length"].as_u64(), Some(3));
}

#[test]
fn phi_eval_respects_k1() {
    let out = run(&["phi", "eval", "--seed", "5", "--points", "200"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out.stdout);
    assert_eq!(r["pass"], true);
    assert_eq!(r["result"]["grid"].as_array().unwrap().len(), 200);
}
