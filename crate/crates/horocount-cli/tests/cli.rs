//! End-to-end checks of the `horocount` binary: contract examples, exit
//! codes, config resolution, and artifact determinism.

use std::path::Path;
use std::process::{Command, Output};

fn horocount(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_horocount"));
    cmd.args(args);
    cmd
}

fn run(args: &[&str]) -> Output {
    horocount(args).output().expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr_str(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

#[test]
fn ford_example_prints_eleven_rows() {
    let out = run(&["enumerate", "--group", "modular", "--window", "0,1", "--min-diam", "1/25"]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "tangent_num,tangent_den,diameter_num,diameter_den,word_length");
    assert_eq!(lines.len(), 1 + 11);
    assert!(lines.iter().any(|l| l.starts_with("2,5,1,25,")));
    assert!(text.ends_with('\n'));
}

#[test]
fn uncalibrated_tau_is_a_usage_error() {
    let out = run(&["count-local", "--tau", "0.9"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_str(&out);
    assert!(err.starts_with("error: usage:"), "stderr: {err}");
    assert!(err.contains("--tau"), "stderr: {err}");
}

#[test]
fn randomized_sweeps_require_a_seed() {
    let out = run(&["proximity", "--n", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_str(&out).contains("--seed"));

    let ok = run(&["proximity", "--n", "10", "--seed", "5"]);
    assert!(ok.status.success(), "stderr: {}", stderr_str(&ok));
    assert!(stdout_str(&ok).contains("\"violations\": 0"));
}

#[test]
fn unknown_group_is_a_usage_error() {
    let out = run(&["enumerate", "--group", "euclid", "--min-diam", "1/4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_str(&out).starts_with("error: usage:"));
}

#[test]
fn missing_min_diam_is_a_usage_error() {
    let out = run(&["enumerate", "--group", "modular"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_str(&out).contains("min-diam"));
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap_or_else(|e| panic!("read {name}: {e}"))
}

#[test]
fn artifacts_are_deterministic_across_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let d1 = tmp.path().join("one");
    let d2 = tmp.path().join("two");
    let args = ["count-global", "--group", "modular", "--k-min", "8", "--k-max", "12"];

    let mut c1 = horocount(&args);
    c1.args(["--out", d1.to_str().unwrap()]).env("HOROCOUNT_THREADS", "1");
    let o1 = c1.output().unwrap();
    assert!(o1.status.success());

    let mut c2 = horocount(&args);
    c2.args(["--out", d2.to_str().unwrap()]).env("HOROCOUNT_THREADS", "3");
    let o2 = c2.output().unwrap();
    assert!(o2.status.success());

    assert_eq!(o1.stdout, o2.stdout);
    assert_eq!(read(&d1, "global.json"), read(&d2, "global.json"));
    assert_eq!(read(&d1, "global.csv"), read(&d2, "global.csv"));
}

#[test]
fn out_directory_mirrors_stdout() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&[
        "enumerate",
        "--min-diam",
        "1/25",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(out.stdout, read(tmp.path(), "enumerate.csv"));
}

#[test]
fn config_file_supplies_flags_and_flags_override() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.json");
    std::fs::write(&cfg, r#"{"group":"modular","window":"0,1","min-diam":"1/25"}"#).unwrap();

    let from_cfg = run(&["enumerate", "--config", cfg.to_str().unwrap()]);
    assert!(from_cfg.status.success());
    let direct = run(&["enumerate", "--group", "modular", "--window", "0,1", "--min-diam", "1/25"]);
    assert_eq!(from_cfg.stdout, direct.stdout);

    let overridden = run(&[
        "enumerate",
        "--config",
        cfg.to_str().unwrap(),
        "--min-diam",
        "1/4",
    ]);
    assert!(overridden.status.success());
    // q <= 2 on [0, 1]: tangents 0/1, 1/1, 1/2.
    assert_eq!(stdout_str(&overridden).lines().count(), 1 + 3);
}

#[test]
fn verify_runs_a_single_criterion() {
    let tmp = tempfile::tempdir().unwrap();
    let out = horocount(&["verify", "--suite", "a7"])
        .args(["--out", tmp.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr_str(&out));
    let text = stdout_str(&out);
    assert!(text.contains("A7 PASS"), "stdout: {text}");
    let saved = String::from_utf8(read(tmp.path(), "verify.txt")).unwrap();
    assert_eq!(saved, text);
}

#[test]
fn reruns_are_byte_identical() {
    let a = run(&["continuity", "--group", "modular"]);
    let b = run(&["continuity", "--group", "modular"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
