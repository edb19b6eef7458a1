use std::path::Path;
use std::process::{Command, Output};

use par_core::curve::LearningCurve;
use par_harness::tables::SUMMARY_HEADER;

fn par(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_par")).args(args).output().unwrap();
    assert!(out.status.success(), "par {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn text(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn run_then_replay_and_tabulate() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("run.jsonl");
    let summary = dir.path().join("summary.tsv");
    let config = dir.path().join("config.toml");
    std::fs::write(&config, "task = \"search-secret\"\nepisodes = 25\n[reporter]\nkind = \"noisy\"\nnoise = 0.2\n").unwrap();
    let out = par(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--planner",
        "repeat",
        "--log",
        log.to_str().unwrap(),
        "--summary",
        summary.to_str().unwrap(),
    ]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with(SUMMARY_HEADER));
    assert_eq!(text(&summary), stdout);
    assert_eq!(text(&log).lines().count(), 25);

    let replayed = par(&["replay", "--log", log.to_str().unwrap(), "--seed", "7", "--verify"]);
    let replayed = String::from_utf8(replayed.stdout).unwrap();
    assert!(replayed.starts_with("QUESTION: "));
    assert!(replayed.contains("verified"));

    let tables = String::from_utf8(par(&["tables", log.to_str().unwrap()]).stdout).unwrap();
    assert_eq!(tables.lines().count(), 2);
    assert_eq!(tables.lines().nth(1).unwrap().split('\t').nth(1), Some("search-secret"));
}

#[test]
fn grid_covers_the_cross_product() {
    let out = par(&[
        "grid",
        "--episodes",
        "10",
        "--tasks",
        "conditional-secret,search-secret",
        "--planners",
        "oracle,naive",
        "--reporters",
        "noisy",
        "--noises",
        "0.0,0.5",
    ]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 1 + 2 * 2 * 2);
}

#[test]
fn trained_weights_drive_a_run() {
    let dir = tempfile::tempdir().unwrap();
    let weights = dir.path().join("reporter.weights");
    let curve = dir.path().join("curve.txt");
    par(&[
        "train-reporter",
        "--episodes",
        "300",
        "--weights",
        weights.to_str().unwrap(),
        "--curve",
        curve.to_str().unwrap(),
    ]);
    let curve = LearningCurve::from_table(&text(&curve)).unwrap();
    assert_eq!(curve.points.len(), 4);
    let out = par(&[
        "run",
        "--task",
        "visual-location",
        "--episodes",
        "20",
        "--reporter",
        "learned",
        "--set",
        &format!("reporter.weights={:?}", weights.to_str().unwrap()),
    ]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 2);
}

#[test]
fn interactive_reads_instructions_from_stdin() {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = Command::new(env!("CARGO_BIN_EXE_par"))
        .args(["interactive", "--task", "search-secret", "--seed", "3", "--max-turns", "2"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"Dance wildly.\n").unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("LM:\nDance wildly.<EOS>\nAgent:\nI could not follow that instruction.<EOS>"), "{stdout}");
}

#[test]
fn bad_override_is_reported() {
    let out = Command::new(env!("CARGO_BIN_EXE_par")).args(["run", "--set", "planner.kind=\"psychic\""]).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn shipped_configs_are_valid() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            par_harness::ExperimentConfig::load(&path, &[]).unwrap();
            seen += 1;
        }
    }
    assert!(seen >= 3);
}
