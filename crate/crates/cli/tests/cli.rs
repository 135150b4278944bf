// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::Command;

use autofix::{summarize, EXIT_CORRECT, EXIT_FIXED, EXIT_UNFIXED, EXIT_USAGE};
use autofix_core::feedback::Verdict;

fn bench(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../benchmarks").join(rel).display().to_string()
}

fn autofix(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_autofix")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("autofix-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn compute_deriv_is_fixed() {
    let (code, out, _) = autofix(&[
        "--ref",
        &bench("computeDeriv/reference.imp"),
        "--student",
        &bench("computeDeriv/student.imp"),
        "--model",
        &bench("computeDeriv/model.eml"),
    ]);
    assert_eq!(code, EXIT_FIXED);
    assert!(out.starts_with("The program requires 3 changes:\n"), "{out}");
    assert!(out.ends_with("cost = 3.\n"));
}

#[test]
fn the_reference_is_correct() {
    let r = bench("computeDeriv/reference.imp");
    let (code, out, _) = autofix(&["--ref", &r, "--student", &r, "--model", &bench("computeDeriv/model.eml")]);
    assert_eq!(code, EXIT_CORRECT);
    assert_eq!(out, "No corrections needed. cost = 0.\n");
}

#[test]
fn a_low_cost_cap_leaves_it_unfixed() {
    let (code, out, _) = autofix(&[
        "--ref",
        &bench("computeDeriv/reference.imp"),
        "--student",
        &bench("computeDeriv/student.imp"),
        "--model",
        &bench("computeDeriv/model.eml"),
        "--max-cost",
        "1",
    ]);
    assert_eq!(code, EXIT_UNFIXED);
    assert_eq!(out, "No fix found within cost 1.\n");
}

#[test]
fn usage_errors_exit_three() {
    let missing = bench("computeDeriv/nope.eml");
    let (code, _, err) = autofix(&[
        "--ref",
        &bench("computeDeriv/reference.imp"),
        "--student",
        &bench("computeDeriv/student.imp"),
        "--model",
        &missing,
    ]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("nope.eml"), "{err}");
    let (code, _, _) = autofix(&["--ref", "x", "--model", "y"]);
    assert_eq!(code, EXIT_USAGE);
    let (code, _, _) = autofix(&["--ref", "x", "--student", "s", "--model", "y", "--level", "9"]);
    assert_eq!(code, EXIT_USAGE);
    let (code, _, _) = autofix(&[
        "--ref",
        &bench("computeDeriv/reference.imp"),
        "--student",
        &bench("computeDeriv/corpus/v14_syntax_error.imp"),
        "--model",
        &bench("computeDeriv/model.eml"),
    ]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn dump_tilde_prints_the_sites() {
    let (code, out, _) = autofix(&[
        "--ref",
        &bench("arrayReverse/reference.imp"),
        "--student",
        &bench("arrayReverse/student.imp"),
        "--model",
        &bench("arrayReverse/overview.eml"),
        "--dump-tilde",
    ]);
    assert_eq!(code, EXIT_CORRECT);
    assert!(out.contains("i - 1"), "{out}");
}

#[test]
fn an_empty_corpus_has_an_empty_summary() {
    let dir = scratch("empty");
    let (code, out, _) = autofix(&[
        "--ref",
        &bench("computeDeriv/reference.imp"),
        "--corpus",
        dir.to_str().unwrap(),
        "--model",
        &bench("computeDeriv/model.eml"),
        "--format",
        "json",
    ]);
    assert_eq!(code, EXIT_CORRECT);
    let j: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(j["entries"], serde_json::json!([]));
    assert_eq!(j["summary"]["total"], 0);
}

#[test]
fn corpus_lines_are_sorted_and_parse_errors_counted() {
    let dir = scratch("mixed");
    std::fs::copy(bench("computeDeriv/student.imp"), dir.join("b.imp")).unwrap();
    std::fs::copy(bench("computeDeriv/reference.imp"), dir.join("a.imp")).unwrap();
    std::fs::write(dir.join("c.imp"), "def f(:\n").unwrap();
    std::fs::write(dir.join("notes.txt"), "ignored").unwrap();
    let (code, out, _) = autofix(&[
        "--ref",
        &bench("computeDeriv/reference.imp"),
        "--corpus",
        dir.to_str().unwrap(),
        "--model",
        &bench("computeDeriv/model.eml"),
    ]);
    assert_eq!(code, EXIT_CORRECT);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "a.imp: correct");
    assert_eq!(lines[1], "b.imp: fixed, cost 3");
    assert!(lines[2].starts_with("c.imp: parse-error"), "{}", lines[2]);
    assert!(
        lines[3].starts_with("total 3, correct 1, fixed 1, unfixed 0, parse-error 1, error 0, fixed_pct 100.0%"),
        "{}",
        lines[3]
    );
}

#[test]
fn summary_statistics() {
    let s = summarize(&[
        (Some(Verdict::Fixed), false, 1.0),
        (Some(Verdict::Fixed), false, 3.0),
        (Some(Verdict::NoFix { k: 5 }), false, 2.0),
        (Some(Verdict::Correct), false, 10.0),
        (None, true, 0.0),
    ]);
    assert_eq!((s.total, s.correct, s.fixed, s.unfixed, s.parse_error), (5, 1, 2, 1, 1));
    assert!((s.fixed_pct - 200.0 / 3.0).abs() < 1e-9);
    assert!((s.avg_s - 4.0).abs() < 1e-9);
    assert!((s.median_s - 2.5).abs() < 1e-9);
}
