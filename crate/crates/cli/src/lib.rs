// SPDX-License-Identifier: Apache-2.0

//! Single-submission repair and batch corpus grading.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Value as Json};

use autofix_core::eml::{parse_eml, rewrite_with_stats, ErrorModel};
use autofix_core::feedback::{render_feedback, report_json, FeedbackReport, Format, Verdict};
use autofix_core::imp::{parse_imp, parse_imp_with, Bounds};
use autofix_core::search::{cegis_min, next_alternate, ReferenceOracle, RepairResult, SearchConfig};
use autofix_core::tilde::dump_tilde;

pub const EXIT_CORRECT: i32 = 0;
pub const EXIT_FIXED: i32 = 1;
pub const EXIT_UNFIXED: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Clone, Debug)]
pub enum Target {
    Student(PathBuf),
    Corpus(PathBuf),
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub reference: PathBuf,
    pub target: Target,
    pub model: PathBuf,
    pub bounds: Bounds,
    pub search: SearchConfig,
    pub alternates: usize,
    pub level: u8,
    pub format: Format,
    pub dump_tilde: bool,
    /// Report wall-clock times; off by default so output is reproducible.
    pub timing: bool,
}

/// What a run prints and how it exits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(msg: impl std::fmt::Display) -> Outcome {
        Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: format!("error: {msg}\n") }
    }
}

pub fn exit_code(v: Verdict) -> i32 {
    match v {
        Verdict::Correct => EXIT_CORRECT,
        Verdict::Fixed => EXIT_FIXED,
        Verdict::NoFix { .. } | Verdict::Budget(_) => EXIT_UNFIXED,
    }
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

/// The shared half of every run: reference oracle and error model.
pub struct Setup {
    pub oracle: ReferenceOracle,
    pub model: Arc<ErrorModel>,
}

impl Setup {
    pub fn load(cfg: &RunConfig) -> Result<Setup, String> {
        let ref_src = read(&cfg.reference)?;
        let reference = parse_imp(&ref_src).map_err(|e| format!("{}: {e}", cfg.reference.display()))?;
        let model_src = read(&cfg.model)?;
        let model = parse_eml(&model_src).map_err(|e| format!("{}: {e}", cfg.model.display()))?;
        let oracle = ReferenceOracle::new(&reference, cfg.bounds).map_err(|e| e.to_string())?;
        Ok(Setup { oracle, model: Arc::new(model) })
    }
}

/// Outcome of repairing one submission.
pub enum Graded {
    ParseError(String),
    Failed(String),
    Report { report: FeedbackReport, seconds: f64 },
}

pub fn grade(setup: &Setup, source: &str, cfg: &RunConfig) -> Graded {
    let start = Instant::now();
    let student = match parse_imp_with(source, &setup.oracle.library_names()) {
        Ok(p) => p,
        Err(e) => return Graded::ParseError(e.to_string()),
    };
    let tilde = match rewrite_with_stats(&student, setup.model.clone()) {
        Ok((t, _)) => t,
        Err(e) => return Graded::Failed(e.to_string()),
    };
    let result = cegis_min(&tilde, &setup.oracle, &cfg.search);
    let mut fixes = Vec::new();
    if let RepairResult::Fixed(f) = &result {
        fixes.push(f.clone());
        for _ in 0..cfg.alternates {
            match next_alternate(&fixes, &tilde, &setup.oracle, &cfg.search) {
                RepairResult::Fixed(g) => fixes.push(g),
                _ => break,
            }
        }
    }
    let mut report = FeedbackReport::new(&tilde, &result, fixes.get(1..).unwrap_or(&[]));
    let seconds = start.elapsed().as_secs_f64();
    if cfg.timing {
        report.stats.millis = (seconds * 1000.0) as u64;
    }
    Graded::Report { report, seconds }
}

pub fn run_single(cfg: &RunConfig) -> Outcome {
    let Target::Student(path) = &cfg.target else { return run_corpus(cfg) };
    let setup = match Setup::load(cfg) {
        Ok(s) => s,
        Err(e) => return Outcome::usage(e),
    };
    let source = match read(path) {
        Ok(s) => s,
        Err(e) => return Outcome::usage(e),
    };
    if cfg.dump_tilde {
        let student = match parse_imp_with(&source, &setup.oracle.library_names()) {
            Ok(p) => p,
            Err(e) => return Outcome::usage(format!("{}: {e}", path.display())),
        };
        return match rewrite_with_stats(&student, setup.model.clone()) {
            Ok((t, _)) => Outcome { code: EXIT_CORRECT, stdout: dump_tilde(&t), stderr: String::new() },
            Err(e) => Outcome::usage(e),
        };
    }
    match grade(&setup, &source, cfg) {
        Graded::ParseError(e) => Outcome::usage(format!("{}: {e}", path.display())),
        Graded::Failed(e) => Outcome::usage(e),
        Graded::Report { report, .. } => Outcome {
            code: exit_code(report.verdict),
            stdout: render_feedback(&report, cfg.level, cfg.format),
            stderr: String::new(),
        },
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Summary {
    pub total: usize,
    pub correct: usize,
    pub fixed: usize,
    pub parse_error: usize,
    pub unfixed: usize,
    pub failed: usize,
    /// Percentage of fixed among submissions that parse and are incorrect.
    pub fixed_pct: f64,
    pub avg_s: f64,
    pub median_s: f64,
}

impl Summary {
    fn json(&self) -> Json {
        json!({
            "total": self.total,
            "correct": self.correct,
            "fixed": self.fixed,
            "parse_error": self.parse_error,
            "unfixed": self.unfixed,
            "failed": self.failed,
            "fixed_pct": round(self.fixed_pct, 1),
            "avg_s": round(self.avg_s, 3),
            "median_s": round(self.median_s, 3),
        })
    }
}

fn round(x: f64, digits: i32) -> f64 {
    let f = 10f64.powi(digits);
    (x * f).round() / f
}

struct Entry {
    name: String,
    graded: Graded,
}

pub fn summarize(entries: &[(Option<Verdict>, bool, f64)]) -> Summary {
    let mut s = Summary { total: entries.len(), ..Summary::default() };
    let mut times = Vec::new();
    for &(v, parse_error, secs) in entries {
        match (v, parse_error) {
            (_, true) => s.parse_error += 1,
            (Some(Verdict::Correct), _) => s.correct += 1,
            (Some(Verdict::Fixed), _) => s.fixed += 1,
            (Some(_), _) => s.unfixed += 1,
            (None, _) => s.failed += 1,
        }
        if !parse_error {
            times.push(secs);
        }
    }
    let incorrect = s.total - s.correct - s.parse_error;
    s.fixed_pct = if incorrect == 0 { 0.0 } else { 100.0 * s.fixed as f64 / incorrect as f64 };
    if !times.is_empty() {
        s.avg_s = times.iter().sum::<f64>() / times.len() as f64;
        times.sort_by(f64::total_cmp);
        let n = times.len();
        s.median_s = if n % 2 == 1 { times[n / 2] } else { (times[n / 2 - 1] + times[n / 2]) / 2.0 };
    }
    s
}

pub fn run_corpus(cfg: &RunConfig) -> Outcome {
    let Target::Corpus(dir) = &cfg.target else { return run_single(cfg) };
    let setup = match Setup::load(cfg) {
        Ok(s) => s,
        Err(e) => return Outcome::usage(e),
    };
    let listing = match std::fs::read_dir(dir) {
        Ok(l) => l,
        Err(e) => return Outcome::usage(format!("cannot read {}: {e}", dir.display())),
    };
    let mut files: Vec<PathBuf> = listing
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "imp"))
        .collect();
    files.sort();
    let entries: Vec<Entry> = files
        .par_iter()
        .map(|p| {
            let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            let graded = match read(p) {
                Ok(src) => grade(&setup, &src, cfg),
                Err(e) => Graded::Failed(e),
            };
            Entry { name, graded }
        })
        .collect();
    let rows: Vec<(Option<Verdict>, bool, f64)> = entries
        .iter()
        .map(|e| match &e.graded {
            Graded::ParseError(_) => (None, true, 0.0),
            Graded::Failed(_) => (None, false, 0.0),
            Graded::Report { report, seconds } => (Some(report.verdict), false, if cfg.timing { *seconds } else { 0.0 }),
        })
        .collect();
    let summary = summarize(&rows);
    let stdout = match cfg.format {
        Format::Json => corpus_json(&entries, &summary, cfg.level),
        Format::Text => corpus_text(&entries, &summary),
    };
    Outcome { code: EXIT_CORRECT, stdout, stderr: String::new() }
}

fn corpus_json(entries: &[Entry], summary: &Summary, level: u8) -> String {
    let rows: Vec<Json> = entries
        .iter()
        .map(|e| match &e.graded {
            Graded::ParseError(msg) => json!({"file": e.name, "verdict": "parse-error", "error": msg}),
            Graded::Failed(msg) => json!({"file": e.name, "verdict": "error", "error": msg}),
            Graded::Report { report, .. } => {
                let mut j = report_json(report, level);
                j["file"] = json!(e.name);
                j
            }
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&json!({"entries": rows, "summary": summary.json()})).expect("serializable");
    s.push('\n');
    s
}

fn corpus_text(entries: &[Entry], summary: &Summary) -> String {
    let mut out = String::new();
    for e in entries {
        let line = match &e.graded {
            Graded::ParseError(msg) => format!("{}: parse-error ({msg})", e.name),
            Graded::Failed(msg) => format!("{}: error ({msg})", e.name),
            Graded::Report { report, .. } => match report.cost {
                Some(c) if report.verdict == Verdict::Fixed => format!("{}: fixed, cost {c}", e.name),
                _ => format!("{}: {}", e.name, report.verdict.name()),
            },
        };
        out.push_str(&line);
        out.push('\n');
    }
    out.push_str(&format!(
        "total {}, correct {}, fixed {}, unfixed {}, parse-error {}, error {}, fixed_pct {:.1}%, avg_s {:.3}, median_s {:.3}\n",
        summary.total,
        summary.correct,
        summary.fixed,
        summary.unfixed,
        summary.parse_error,
        summary.failed,
        summary.fixed_pct,
        summary.avg_s,
        summary.median_s
    ));
    out
}
