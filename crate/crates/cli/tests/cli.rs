use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn microsim(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_microsim"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], out: &Path) {
    let o = microsim(args, out);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
}

fn synth(out: &Path) {
    ok(&["gen-synth", "--size", "1500", "--eds", "8", "--seed", "5"], out);
    ok(&["init"], out);
}

#[test]
fn full_pipeline_writes_every_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    synth(out);
    ok(&["run", "--years", "4"], out);
    ok(&["dcm", "--years", "4"], out);
    ok(&["validate", "--years", "4"], out);
    ok(&["report"], out);
    for f in [
        "summary.csv",
        "events.csv",
        "education_events.csv",
        "final_population.csv",
        "dcm_projection.csv",
        "validation_report.csv",
        "table2_style.txt",
        "ed_metrics.csv",
        "education_shares.csv",
    ] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 5);
    let table = fs::read_to_string(out.join("table2_style.txt")).unwrap();
    assert!(table.contains("DCM") && table.contains("Micro"));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    synth(out);
    let mut runs = Vec::new();
    for workers in ["1", "1", "3"] {
        ok(&["run", "--years", "3", "--workers", workers], out);
        runs.push((
            fs::read(out.join("events.csv")).unwrap(),
            fs::read(out.join("final_population.csv")).unwrap(),
        ));
    }
    assert!(!runs[0].0.is_empty());
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0], runs[2]);
}

#[test]
fn checkpoint_resume_matches_a_straight_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    synth(out);
    ok(&["run", "--years", "4"], out);
    let straight = fs::read(out.join("final_population.csv")).unwrap();
    let ckpt = out.join("half.ckpt");
    ok(&["run", "--years", "2", "--checkpoint", ckpt.to_str().unwrap()], out);
    ok(&["run", "--years", "2", "--resume", ckpt.to_str().unwrap()], out);
    assert_eq!(fs::read(out.join("final_population.csv")).unwrap(), straight);
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = microsim(&["--scenario", "M4", "run"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("M1"));
    assert_eq!(microsim(&["--bogus"], dir.path()).status.code(), Some(1));
}

#[test]
fn missing_inputs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = microsim(&["run", "--rates", "no/such/dir"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("geography.csv"));
}
