use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn instexp(args: &[&str], output_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_instexp"))
        .args(args)
        .env("INSTEXP_OUTPUT_DIR", output_dir)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("exp.cfg");
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const SMALL: &str = "[run]\nname = small\nseeds = [1, 2]\n[stream]\nstream = SEA2\nlength = 2000\n\
                     [learner]\nlearner = NB\n[active]\nbudgets = [0.5, 0.1]\n[exploit]\nstrategy = [baseline, UW]\n";

#[test]
fn presets_are_listed() {
    let dir = tempfile::tempdir().unwrap();
    let out = instexp(&["presets", "list"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 15);
    assert!(text.lines().any(|l| l.starts_with("SEA1")));
}

#[test]
fn validate_reports_the_offending_line() {
    let dir = tempfile::tempdir().unwrap();
    let good = write_config(dir.path(), SMALL);
    let out = instexp(&["validate", &good], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("cells         8"), "{text}");

    let bad = write_config(
        dir.path(),
        "stream = SEA1\nlearner = NB\nbudgets = [0.5, 1.5]\n",
    );
    let out = instexp(&["validate", &bad], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 3"));
}

#[test]
fn run_writes_reproducible_csv() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let first = instexp(&["run", &config], dir.path());
    assert!(
        first.status.success(),
        "{}",
        String::from_utf8_lossy(&first.stderr)
    );
    let csv_path = dir.path().join("small.csv");
    let a = fs::read(&csv_path).unwrap();
    assert_eq!(a.iter().filter(|&&b| b == b'\n').count(), 9);
    assert!(String::from_utf8_lossy(&first.stderr).contains("[8/8]"));

    let explicit = dir.path().join("nested/out.csv");
    let second = instexp(
        &[
            "run",
            &config,
            "--jobs",
            "3",
            "--output",
            explicit.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(second.status.success());
    assert_eq!(fs::read(&explicit).unwrap(), a);
}

#[test]
fn seed_override_runs_one_seed() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let out = instexp(&["run", &config, "--seed-override", "7"], dir.path());
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("small.csv")).unwrap();
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn failed_cells_give_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "name = broken\nstream = missing.csv\nlearner = NB\nbudgets = [0.5]\n",
    );
    let out = instexp(&["run", &config], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("failed:"));
    let text = fs::read_to_string(dir.path().join("broken.csv")).unwrap();
    assert_eq!(text.lines().count(), 1, "header only");
}
