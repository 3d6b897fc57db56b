use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn mcmr(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcmr")).args(args).current_dir(dir).output().expect("binary runs")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn pump_scan_writes_one_row_per_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let o = mcmr(&["scan", "--scenario", "pump_convergence", "--cycles", "1..16", "--out", "res", "--label", "t"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("res/pump_convergence-t.csv")).unwrap();
    assert_eq!(csv.lines().count(), 17);
    assert!(dir.path().join("res/pump_convergence-t.json").exists());
}

#[test]
fn missing_scheme_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = mcmr(&["scan", "--scenario", "measure_fidelity", "--scheme", "absent.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("absent.json"));
}

#[test]
fn unknown_scenario_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(mcmr(&["scan", "--scenario", "nope"], dir.path()).status.code(), Some(2));
    assert_eq!(mcmr(&["scan"], dir.path()).status.code(), Some(2));
}

#[test]
fn config_file_is_merged_with_flags() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.json"),
        r#"{"scenario": "dress_rotate_error", "sweep": "0.9..1.05:4", "label": "cfg", "output_dir": "a"}"#,
    )
    .unwrap();
    let o = mcmr(&["scan", "--config", "run.json", "--out", "b"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("b/dress_rotate_error-cfg.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    std::fs::write(dir.path().join("bad.json"), r#"{"scenario": "ramsey_phase", "sweeep": "1..2"}"#).unwrap();
    assert_eq!(mcmr(&["scan", "--config", "bad.json"], dir.path()).status.code(), Some(2));
}

#[test]
fn dress_rotate_scan_with_shipped_sequence() {
    let dir = tempfile::tempdir().unwrap();
    let seq = data("sequence2.json");
    let o = mcmr(&["scan", "--scenario", "dress_rotate_error", "--sequence", &seq, "--out", "."], dir.path());
    assert!(o.status.success());
    let max: f64 = stdout(&o)
        .lines()
        .find_map(|l| l.strip_prefix("max_xy_error_in_band = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(max <= 1e-6);
}

#[test]
fn evaluate_prints_band_errors() {
    let dir = tempfile::tempdir().unwrap();
    let o = mcmr(&["evaluate", &data("sequence2.json")], dir.path());
    assert!(o.status.success());
    let out = stdout(&o);
    let e1: f64 = out.lines().find_map(|l| l.strip_prefix("e1 = ")).unwrap().parse().unwrap();
    assert!(e1 < 1e-6);
    assert_eq!(out.lines().filter(|l| l.starts_with("fluctuation")).count(), 21);
    assert_eq!(mcmr(&["evaluate", "missing.json"], dir.path()).status.code(), Some(2));
}

#[test]
fn optimize_reaches_default_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let o = mcmr(&["optimize", "--delta-ratio", "0.5", "--seed", "3", "--out", "seq.json"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let e = mcmr(&["evaluate", "seq.json"], dir.path());
    assert!(e.status.success());
    assert!(dir.path().join("seq.report.json").exists());
}

#[test]
fn optimize_unreachable_threshold_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let o = mcmr(&["optimize", "--delta-ratio", "0.5", "--budget", "1", "--threshold", "1e-30"], dir.path());
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn compile_reproduces_golden_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let o = mcmr(&["compile", &data("program-measure.json"), "--out", "s.json"], dir.path());
    assert!(o.status.success());
    let ours: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("s.json")).unwrap()).unwrap();
    let golden: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(data("schedule-measure.json")).unwrap()).unwrap();
    assert_eq!(ours, golden);
}

#[test]
fn threads_flag_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let o = mcmr(&["--threads", "2", "evaluate", &data("sequence1.json")], dir.path());
    assert!(o.status.success());
    assert_eq!(mcmr(&["--threads", "0", "evaluate", &data("sequence1.json")], dir.path()).status.code(), Some(2));
}
