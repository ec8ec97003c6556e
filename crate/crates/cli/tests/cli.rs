use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn dlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dlab")).args(args).output().expect("dlab runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn generated(dir: &Path, generator: &str) -> PathBuf {
    let g = write(dir, "gen.json", generator);
    let out = dlab(&["generate", s(&g)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    write(dir, "seq.json", std::str::from_utf8(&out.stdout).unwrap())
}

#[test]
fn cc_on_disjoint_boxes_passes_with_zero_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let seq = generated(
        dir.path(),
        r#"{"kind": "disjoint_boxes", "n": 12, "eta": 0.75, "min_depth": 1e-4, "max_depth": 1e-2}"#,
    );
    let out = dlab(&["check", "cc", s(&seq)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["sup_ratio"], 0.0);
}

#[test]
fn ws_on_duplicate_fails() {
    let dir = tempfile::tempdir().unwrap();
    let seq = write(
        dir.path(),
        "dup.json",
        r#"{"label": "dup", "points": [{"r": 0.5, "theta": 1.0}, {"r": 0.5, "theta": 1.0}]}"#,
    );
    let out = dlab(&["check", "ws", s(&seq)]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["pass"], false);
    assert_eq!(v["result"]["summary"]["min_metric"], 0.0);
}

#[test]
fn theorem_d_on_a_comb_reports_every_point() {
    let dir = tempfile::tempdir().unwrap();
    let seq = generated(dir.path(), r#"{"kind": "comb", "level": 16, "turn": 0.3}"#);
    let out = dlab(&["check", "theorem-d", s(&seq), "--k", "1e6"]);
    assert_eq!(out.status.code(), Some(0));
    let records = json(&out)["result"]["records"].as_array().unwrap().clone();
    assert_eq!(records.len(), 5);
    assert!(records[0]["ratio"].as_f64().unwrap() > 0.0);
}

#[test]
fn mass_and_carleson() {
    let dir = tempfile::tempdir().unwrap();
    let seq = generated(dir.path(), r#"{"kind": "radial", "lambda": 0.5, "n": 10, "power": 2}"#);
    let out = dlab(&["check", "mass", s(&seq)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["result"]["mass"].as_f64().unwrap() > 0.0);
    assert!(v["result"]["tail_bound"].as_f64().unwrap() > 0.0);
    let out = dlab(&["check", "cm", s(&seq), "--levels", "3", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("index,lhs,rhs,ratio"));
    assert_eq!(text.lines().count(), 1 + 1 + 2 + 4 + 8);
}

#[test]
fn comb_sweep_csv_increases_toward_the_limit() {
    let out = dlab(&["tree", "comb", "--m", "2..10", "--exact"]);
    assert_eq!(out.status.code(), Some(0));
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    let headers = r.headers().unwrap().clone();
    assert_eq!(headers.iter().collect::<Vec<_>>(), ["N", "c0", "c0_sqrtN", "closed_form", "exact_solver", "limit_gap"]);
    let scaled: Vec<f64> = r.records().map(|row| row.unwrap()[2].parse().unwrap()).collect();
    assert_eq!(scaled.len(), 9);
    assert!(scaled.windows(2).all(|w| w[1] > w[0]));
    assert!(*scaled.last().unwrap() < 0.7616);
}

#[test]
fn single_path_capacity() {
    let out = dlab(&["tree", "cap", "--single-path-depth", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["result"]["recursive"].as_f64().unwrap() - 1.0 / 7.0).abs() < 1e-15);
    assert!((v["result"]["exact"].as_f64().unwrap() - 1.0 / 7.0).abs() < 1e-12);
}

#[test]
fn tree_cap_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "c.json",
        r#"{"source": {"n": 0, "k": 1}, "targets": [{"n": 2, "k": 1}, {"n": 2, "k": 2}]}"#,
    );
    let v = json(&dlab(&["tree", "cap", s(&f)]));
    assert!((v["result"]["recursive"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-15);
    let bad = write(dir.path(), "b.json", r#"{"source": {"n": 3, "k": 1}, "targets": [{"n": 2, "k": 1}]}"#);
    assert_eq!(dlab(&["tree", "cap", s(&bad)]).status.code(), Some(2));
}

#[test]
fn counterexample_default_passes() {
    let out = dlab(&["tree", "counterexample"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["result"]["min_metric"].as_f64().unwrap() > 0.0);
    assert_eq!(v["result"]["combs"].as_array().unwrap().len(), 3);
}

#[test]
fn distcheck_passes() {
    let out = dlab(&["tree", "distcheck", "--n-max", "60"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn empty_arc_list_has_zero_capacity() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "a.json", "[]");
    let out = dlab(&["capacity", "arcs", s(&f)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["capacity"], 0.0);
}

#[test]
fn intersecting_plates_give_zero_with_a_note() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "c.json",
        r#"{"plate_inner": {"center": {"r": 0.5, "theta": 0}, "radius": 1.0},
            "plate_outer": {"discs": [{"center": {"r": 0.6, "theta": 0}, "radius": 1.0}]}}"#,
    );
    let out = dlab(&["capacity", "condenser", s(&f)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["capacity"], 0.0);
    assert!(v["result"]["warning"].as_str().unwrap().contains("convention"));
}

#[test]
fn grid_annulus_benchmark() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "c.json",
        r#"{"plate_inner": {"center": {"r": 0, "theta": 0}, "radius": 1.0},
            "plate_outer": {"arcs": [{"center_angle": 0, "length": 1.0}]}}"#,
    );
    let field = dir.path().join("u.csv");
    let out = dlab(&["capacity", "grid", s(&f), "--grid-r", "32", "--grid-t", "32", "--field", s(&field)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let exact = std::f64::consts::TAU / (1.0f64 / 1f64.tanh()).ln();
    let coarse = v["result"]["capacity"].as_f64().unwrap();
    let fine = v["result"]["refined_capacity"].as_f64().unwrap();
    assert!((coarse / exact - 1.0).abs() < 0.15, "{coarse} vs {exact}");
    assert!((fine - exact).abs() <= (coarse - exact).abs());
    assert!(std::fs::read_to_string(&field).unwrap().starts_with("r,theta,value"));
}

#[test]
fn unresolved_plate_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "c.json",
        r#"{"plate_inner": {"center": {"r": 0, "theta": 0}, "radius": 1.0},
            "plate_outer": {"arcs": [{"center_angle": 1.0, "length": 1e-6}]}}"#,
    );
    let out = dlab(&["capacity", "grid", s(&f), "--grid-r", "16", "--grid-t", "64", "--no-refine"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("resolution"));
}

#[test]
fn parse_errors_exit_2_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.json", "{\"label\": \"x\",\n \"points\": [{\"r\": 2.0, \"theta\": 0}]}");
    let out = dlab(&["check", "ws", s(&f)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    assert_eq!(dlab(&["tree", "comb", "--m", "3..x"]).status.code(), Some(2));
    assert_eq!(dlab(&["check", "ws", s(&f), "--gamma", "1.5"]).status.code(), Some(2));
}

#[test]
fn embedded_config_reproduces_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let seq = generated(
        dir.path(),
        r#"{"kind": "disjoint_boxes", "n": 6, "eta": 0.5, "min_depth": 1e-3, "max_depth": 1e-2}"#,
    );
    let first = dir.path().join("r1.json");
    let out = dlab(&["check", "cc", s(&seq), "--gamma", "0.5", "--quad", "24", "--k", "3", "--out", s(&first)]);
    assert!(out.status.code().is_some());
    let second = dir.path().join("r2.json");
    dlab(&["check", "cc", s(&seq), "--config", s(&first), "--out", s(&second)]);
    let (a, b) = (std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
    assert_eq!(a, b);
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["config"]["gamma"], 0.5);
    assert_eq!(v["config"]["quad"], 24);
}
