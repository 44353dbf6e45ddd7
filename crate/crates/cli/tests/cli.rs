use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn dspipe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dspipe"))
        .args(args)
        .env_remove("DSPIPE_DICT")
        .output()
        .unwrap()
}

fn fixture(rel: &str) -> String {
    fixtures().join(rel).to_str().unwrap().to_string()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn missing_file_exits_two() {
    let out = dspipe(&["extract", "/nonexistent/x.py"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("dspipe: error: "));
    assert!(out.stdout.is_empty());
}

#[test]
fn empty_directory_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dspipe(&["corpus", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_arguments_exit_two() {
    assert_eq!(
        dspipe(&["lint", "x", "--jungle-min-runs", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(dspipe(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(dspipe(&["--help"]).status.code(), Some(0));
}

#[test]
fn lint_exit_reflects_warnings() {
    let warned = dspipe(&["lint", &fixture("corpus/random_forest.py")]);
    assert_eq!(warned.status.code(), Some(1));
    assert!(stdout(&warned).contains("MissingEvaluation"));

    let clean = dspipe(&["lint", &fixture("corpus/titanic.py"), "--rules", "feedback"]);
    assert_eq!(clean.status.code(), Some(0));
    assert!(!stdout(&clean).contains("MissingEvaluation"));
}

#[test]
fn feedback_rule_reports_prd_to_mdl() {
    let out = dspipe(&[
        "lint",
        &fixture("corpus/random_forest.py"),
        "--rules",
        "feedback",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("FeedbackLoop"), "{text}");
    assert!(text.contains("PRD") && text.contains("MDL"), "{text}");
}

#[test]
fn unknown_rule_is_an_error() {
    let out = dspipe(&["lint", &fixture("corpus/titanic.py"), "--rules", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn csv_matrix_is_square() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("m.csv");
    let out = dspipe(&["corpus", &fixture("corpus"), "--csv", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(csv).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().map(|l| l.split(',').collect()).collect();
    assert!(rows.len() > 1);
    assert!(rows.iter().all(|r| r.len() == rows.len()));
    assert_eq!(
        rows[0][1..],
        rows[1..].iter().map(|r| r[0]).collect::<Vec<_>>()[..]
    );
}

#[test]
fn dot_outputs() {
    let one = dspipe(&["extract", &fixture("corpus/titanic.py"), "--format", "dot"]);
    assert!(stdout(&one).starts_with("digraph"));
    let corpus = dspipe(&["corpus", &fixture("corpus"), "--format", "dot"]);
    assert!(stdout(&corpus).starts_with("digraph \"corpus\""));
    let lint = dspipe(&["lint", &fixture("corpus"), "--format", "dot"]);
    assert_eq!(lint.status.code(), Some(2));
}

#[test]
fn broken_cell_is_reported_on_stderr() {
    let out = dspipe(&["extract", &fixture("corpus/eda_vis.ipynb")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("cell 5 skipped"), "{}", stderr(&out));
}

#[test]
fn include_glob_narrows_corpus() {
    let out = dspipe(&["corpus", &fixture("corpus"), "--include", "*.ipynb"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["n_pipelines"], 3);
}

#[test]
fn dict_validate_reports_seed() {
    let out = dspipe(&["dict-validate"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("ok: 699 entries"));
}

#[test]
fn kappa_rejects_length_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    std::fs::write(&a, "[1, 2]").unwrap();
    std::fs::write(&b, "[1]").unwrap();
    let out = dspipe(&["kappa", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
