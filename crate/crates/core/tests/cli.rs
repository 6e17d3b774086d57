use std::path::Path;
use std::process::{Command, Output};

fn pfev(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pfev"))
        .args(args)
        .env("PFEV_OUT_DIR", out)
        .output()
        .unwrap()
}

const SMALL_RUN: &str = r#"
strategy = "random"
iterations = 3
seed = 2

[problem]
kind = "named"
name = "fonseca"

[reference]
generations = 30
population = 20
"#;

#[test]
fn run_writes_history_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, SMALL_RUN).unwrap();
    let o = pfev(&["run", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut names = Vec::new();
    for e in walkdir(dir.path()) {
        names.push(e.file_name().unwrap().to_string_lossy().into_owned());
    }
    for want in ["history.jsonl", "timings.jsonl", "summary.csv"] {
        assert!(names.iter().any(|n| n == want), "{want} missing from {names:?}");
    }
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = pfev(&["run", "--strategy", "nope"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = pfev(&["run", "--iterations", "0"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "iterations = \"many\"").unwrap();
    let o = pfev(&["run", "--config", bad.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = pfev(&["ref-frontier", "--problem", "no-such-problem"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_config_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = pfev(&["run", "--config", "/nonexistent/run.toml"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gap_study_writes_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = pfev(
        &["gap-study", "--objectives", "2", "--sizes", "10", "--seeds", "2", "--out", dir.path().to_str().unwrap()],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!walkdir(dir.path()).is_empty());
}

fn walkdir(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(walkdir(&p));
        } else {
            out.push(p);
        }
    }
    out
}
