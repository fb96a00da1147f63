//! End-to-end CLI tests against the compiled binary.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_weingarten"));
    cmd.env_remove("WEINGARTEN_CONFIG");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("weingarten-cli-{tag}-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn trace_csv_reaches_the_closed_form_endpoint() {
    let out = run(&["trace", "--K", "1", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("s,x,z,theta"));
    let last = text.lines().last().unwrap();
    let s_end: f64 = last.split(',').next().unwrap().parse().unwrap();
    let s1 = (1.0f64 + 2.0f64.sqrt()).ln();
    assert!((s_end - s1).abs() <= 1e-6, "s_end = {s_end}");
}

#[test]
fn classify_reports_the_contact_angle_and_passes() {
    let out = run(&["classify", "--m", "-2", "--n", "1"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["outcome"]["passed"], true);
    let angle = doc["report"]["quantitative"]["contact_angle"].as_f64().unwrap();
    assert!((angle - (1.0f64 / 3.0).acos()).abs() <= 1e-9);
    assert_eq!(doc["report"]["regime"], "LwConcaveGraph");
}

#[test]
fn raw_relation_flags_match_canonical_flags() {
    // a k1 + b k2 = c with (1, 2, 1) normalizes to (m, n) = (-2, 1).
    let canonical = run(&["trace", "--m", "-2", "--n", "1"]);
    let raw = run(&["trace", "--a", "1", "--b", "2", "--c", "1"]);
    assert!(canonical.status.success() && raw.status.success());
    assert_eq!(canonical.stdout, raw.stdout);
}

#[test]
fn figures_writes_six_svgs() {
    let dir = scratch_dir("figs");
    let out = run(&["figures", "--out-dir", dir.to_str().unwrap()]);
    assert!(out.status.success());
    let svgs: Vec<_> = fs::read_dir(&dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.path().extension().is_some_and(|x| x == "svg"))
        .collect();
    assert_eq!(svgs.len(), 6);
    for entry in svgs {
        let text = fs::read_to_string(entry.path()).unwrap();
        assert!(text.starts_with("<svg"), "{:?}", entry.path());
    }
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn mesh_writes_a_parsable_obj() {
    let dir = scratch_dir("mesh");
    let path = dir.join("strip.obj");
    let out = run(&[
        "mesh",
        "--K",
        "0",
        "--t-width",
        "1.5",
        "--cols",
        "4",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = fs::read_to_string(&path).unwrap();
    let v = text.lines().filter(|l| l.starts_with("v ")).count();
    let f = text.lines().filter(|l| l.starts_with("f ")).count();
    assert!(v > 0 && f > 0);
    assert_eq!(f, (v / 4 - 1) * 3);
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn flag_errors_exit_2() {
    assert_eq!(run(&["trace"]).status.code(), Some(2));
    assert_eq!(
        run(&["trace", "--K", "1", "--m", "1", "--n", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["trace", "--m", "1"]).status.code(), Some(2));
    // Trivial relations have nothing to trace.
    assert_eq!(run(&["trace", "--m", "-1", "--n", "2"]).status.code(), Some(2));
    assert_eq!(run(&["trace", "--a", "0", "--b", "0", "--c", "1"]).status.code(), Some(2));
}

#[test]
fn config_file_overrides_and_rejects_unknown_keys() {
    let dir = scratch_dir("config");
    let good = dir.join("good.conf");
    fs::write(&good, "s_max = 5\nmax_step = 0.005\n").unwrap();
    let out = bin()
        .args(["trace", "--K", "0"])
        .env("WEINGARTEN_CONFIG", &good)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let s_end: f64 = text
        .lines()
        .last()
        .unwrap()
        .split(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((s_end - 5.0).abs() <= 1e-9, "s_end = {s_end}");

    let bad = dir.join("bad.conf");
    fs::write(&bad, "step_count = 3\n").unwrap();
    let out = bin()
        .args(["trace", "--K", "0"])
        .env("WEINGARTEN_CONFIG", &bad)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    fs::remove_dir_all(&dir).ok();
}
