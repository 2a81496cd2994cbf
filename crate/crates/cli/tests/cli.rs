use std::path::Path;
use std::process::{Command, Output};

fn henon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_henon"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 stdout")
}

fn stderr_json(o: &Output) -> serde_json::Value {
    let text = String::from_utf8(o.stderr.clone()).expect("utf-8 stderr");
    let line = text.lines().last().expect("stderr has a line");
    serde_json::from_str(line).expect("stderr ends with JSON")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).expect("write temp file");
    path.to_string_lossy().into_owned()
}

#[test]
fn certify_inside_region_exits_zero() {
    let o = henon(&["certify", "--mu", "0.9", "--b", "0.3", "--grid-density", "10", "--iterations", "100"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = stderr_json(&o);
    assert_eq!(summary["certified"], true);
}

#[test]
fn invalid_b_exits_two_with_constraint() {
    let o = henon(&["simulate", "--b", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr_json(&o);
    assert!(err["constraint"].is_string(), "{err}");
}

#[test]
fn uncertified_parameters_exit_one() {
    let o = henon(&["certify", "--mu", "2.5", "--b", "0.3"]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.json", r#"{"map": {"f": {"kind": "quadratic", "mu": 1.0}, "b": 0.1, "a": []}, "bogus": 1}"#);
    let o = henon(&["--config", &cfg, "spectrum"]);
    assert_eq!(o.status.code(), Some(2));
    let text = String::from_utf8_lossy(&o.stderr);
    assert!(text.contains("bogus"), "{text}");
}

#[test]
fn dumped_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let first = henon(&["--mu", "1.1", "--b", "0.2", "--a", "0.3,-0.1", "--seed", "9", "--dump-config", "spectrum"]);
    assert_eq!(first.status.code(), Some(0));
    let path = write(dir.path(), "dumped.json", &stdout(&first));
    let second = henon(&["--config", &path, "--dump-config", "spectrum"]);
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(stdout(&first), stdout(&second));
    let v: serde_json::Value = serde_json::from_str(&stdout(&first)).unwrap();
    assert_eq!(v["map"]["a"].as_array().map(Vec::len), Some(2));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"map": {"f": {"kind": "quadratic", "mu": 1.0}, "b": 0.1, "a": []}}"#);
    let o = henon(&["--config", &cfg, "--b", "0.25", "--dump-config", "spectrum"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["map"]["b"], 0.25);
    assert_eq!(v["map"]["f"]["mu"], 1.0);
}

#[test]
fn simulate_is_deterministic_and_csv_shaped() {
    let args = ["simulate", "--mu", "1.0", "--b", "0.2", "--a", "0.1", "--points", "500", "--seed", "3"];
    let a = henon(&args);
    let b = henon(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let body = stdout(&a);
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("x,y1,y2,lle"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 500);
    for r in &rows {
        let cells: Vec<&str> = r.split(',').collect();
        assert_eq!(cells.len(), 4);
        assert!(cells[0].contains('e'), "floats use exponent format: {r}");
    }
}

#[test]
fn simulate_with_zero_b_has_zero_y() {
    let o = henon(&["simulate", "--mu", "1.2", "--b", "0", "--points", "100", "--transient", "5"]);
    assert_eq!(o.status.code(), Some(0));
    for row in stdout(&o).lines().skip(1) {
        let y: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(y, 0.0);
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("spec.json");
    let o = henon(&["spectrum", "--mu", "1.0", "--b", "0.3", "--format", "json", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(v.is_object());
}

#[test]
fn sweep_output_independent_of_workers() {
    let base = ["sweep", "--mu-steps", "6", "--b-steps", "5", "--verify", "--seed", "1"];
    let one = henon(&[&base[..], &["--workers", "1"]].concat());
    let four = henon(&[&base[..], &["--workers", "4"]].concat());
    assert_eq!(one.status.code(), Some(0), "{}", String::from_utf8_lossy(&one.stderr));
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(stdout(&one).lines().count(), 1 + 6 * 5);
}

#[test]
fn horseshoe_reports_verification() {
    let o = henon(&["horseshoe", "--mu", "3", "--b", "0.01", "--lines", "20", "--points", "2000", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = stderr_json(&o);
    assert_eq!(summary["covering_verified"], true, "{summary}");
}

#[test]
fn continue_reports_orbits() {
    let o = henon(&["continue", "--mu", "0.9", "--b", "0", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v.to_string().contains("period"));
}
