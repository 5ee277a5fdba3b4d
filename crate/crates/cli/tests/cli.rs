use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dts(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dts"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("spawn dts")
}

fn ok(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn run_writes_a_trace() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(&dts(
        &["run", "--approach", "mdts", "--duration", "300", "--run", "3", "--out", "o"],
        dir.path(),
    ));
    assert!(stdout.starts_with("MDTS run 3"), "{stdout}");
    let trace = fs::read_to_string(dir.path().join("o/trace_mdts_run0003.csv")).unwrap();
    assert!(trace.starts_with("time_s,"));
    // one row per control cycle plus the initial one
    assert_eq!(trace.lines().count(), 1 + 101);
}

#[test]
fn run_rejects_several_approaches() {
    let dir = tempfile::tempdir().unwrap();
    let out = dts(&["run", "--approach", "pt,mdts"], dir.path());
    assert!(!out.status.success());
}

#[test]
fn experiment_then_summarize() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(&dts(
        &["experiment", "--approach", "pt,uapt,mdts", "--runs", "3", "--duration", "900", "--threads", "2", "--out", "e"],
        dir.path(),
    ));
    assert!(stdout.contains("9 runs written"), "{stdout}");
    let e = dir.path().join("e");
    for f in ["switch_errors.csv", "uncertainties.csv", "manifest.txt", "traces/uapt_run0002.csv"] {
        assert!(e.join(f).is_file(), "{f}");
    }
    let summary = ok(&dts(&["summarize", "e/switch_errors.csv"], dir.path()));
    for a in ["PT", "UAPT", "MDTS"] {
        assert!(summary.contains(a), "{summary}");
    }
}

#[test]
fn experiment_without_traces() {
    let dir = tempfile::tempdir().unwrap();
    ok(&dts(&["experiment", "--runs", "2", "--duration", "300", "--no-traces", "--out", "e"], dir.path()));
    assert!(dir.path().join("e/switch_errors.csv").is_file());
    assert!(!dir.path().join("e/traces").exists());
}

#[test]
fn calibrate_saves_a_loadable_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(&dts(
        &["calibrate", "--duration", "300", "--runs", "1", "--target-std", "0.2", "--out", "cal.scn"],
        dir.path(),
    ));
    assert!(stdout.contains("k_num ="), "{stdout}");
    assert!(stdout.contains("I = 3.000 A"), "{stdout}");
    let text = fs::read_to_string(dir.path().join("cal.scn")).unwrap();
    assert!(text.contains("solver.k_num"));
    ok(&dts(&["run", "--scenario", "cal.scn", "--out", "o"], dir.path()));
}

#[test]
fn unknown_scenario_key_is_reported_with_its_line() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.scn"), "# comment\nseed = 1\nsolver.hh = 0.1\n").unwrap();
    let out = dts(&["run", "--scenario", "bad.scn"], dir.path());
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("solver.hh") && err.contains('3'), "{err}");
}

#[test]
fn unstable_step_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = dts(&["run", "--step", "150", "--duration", "300"], dir.path());
    assert!(!out.status.success());
}
