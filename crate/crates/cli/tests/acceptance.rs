// SPDX-License-Identifier: Apache-2.0

//! End-to-end acceptance checks. Each criterion prints one PASS or FAIL
//! line; the process exits non-zero if any fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use autofix::{grade, Graded, RunConfig, Setup, Target};
use autofix_core::eml::{check_well_formed, parse_eml, rewrite, rewrite_with_stats};
use autofix_core::feedback::Format;
use autofix_core::imp::signature::parse_signature;
use autofix_core::imp::*;
use autofix_core::search::{cegis_min, RepairResult, SearchConfig};
use autofix_core::tilde::{default_assignment, enumerate_candidates, SiteForest};
use common::oracle::{brute_force_min, expand_program_upto};
use serde_json::Value as Json;

type Verdict = Result<String, String>;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../benchmarks")
}

fn bench(rel: &str) -> PathBuf {
    root().join(rel)
}

fn read(rel: &str) -> String {
    std::fs::read_to_string(bench(rel)).unwrap()
}

fn autofix(args: &[&str], jobs: usize) -> (i32, String) {
    let out =
        Command::new(env!("CARGO_BIN_EXE_autofix")).args(args).args(["--jobs", &jobs.to_string()]).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

fn single_args(dir: &str, extra: &[&str]) -> Vec<String> {
    let mut v: Vec<String> = vec![
        "--ref".into(),
        bench(&format!("{dir}/reference.imp")).display().to_string(),
        "--student".into(),
        bench(&format!("{dir}/student.imp")).display().to_string(),
        "--model".into(),
        bench(&format!("{dir}/model.eml")).display().to_string(),
        "--format".into(),
        "json".into(),
        "--level".into(),
        "4".into(),
    ];
    v.extend(extra.iter().map(|s| s.to_string()));
    v
}

fn corpus_args() -> Vec<String> {
    vec![
        "--ref".into(),
        bench("computeDeriv/reference.imp").display().to_string(),
        "--corpus".into(),
        bench("computeDeriv/corpus").display().to_string(),
        "--model".into(),
        bench("computeDeriv/model.eml").display().to_string(),
        "--format".into(),
        "json".into(),
    ]
}

fn run(args: &[String], jobs: usize) -> (i32, String) {
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    autofix(&refs, jobs)
}

fn corrections(j: &Json) -> BTreeSet<(u64, String, String)> {
    j.as_array()
        .unwrap()
        .iter()
        .map(|c| (c["line"].as_u64().unwrap(), c["sub"].as_str().unwrap().to_string(), c["new"].as_str().unwrap().to_string()))
        .collect()
}

fn set(items: &[(u64, &str, &str)]) -> BTreeSet<(u64, String, String)> {
    items.iter().map(|&(l, s, n)| (l, s.to_string(), n.to_string())).collect()
}

fn check(ok: bool, what: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let (code, out) = run(&single_args("computeDeriv", &[]), 1);
    let secs = start.elapsed().as_secs_f64();
    let j: Json = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    check(code == 1, format!("exit code {code}"))?;
    check(j["verdict"] == "fixed", format!("verdict {}", j["verdict"]))?;
    check(j["cost"] == 3, format!("cost {}", j["cost"]))?;
    let got = corrections(&j["corrections"]);
    let want = set(&[(5, "deriv", "[0]"), (6, "0", "1"), (7, "(poly[expo] == 0)", "False")]);
    check(got == want, format!("corrections {got:?}"))?;
    check(secs <= 120.0, format!("{secs:.1} s"))?;
    Ok(format!("cost 3, corrections at lines 5, 6, 7, {secs:.2} s"))
}

fn criterion_2() -> Verdict {
    let start = Instant::now();
    let (code, out) = run(&single_args("arrayReverse", &["--alternates", "1"]), 1);
    let j: Json = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    check(code == 1 && j["verdict"] == "fixed", format!("exit {code}, verdict {}", j["verdict"]))?;
    check(j["cost"] == 2, format!("minimal cost {}", j["cost"]))?;
    let got = corrections(&j["corrections"]);
    check(got == set(&[(7, "i", "i - 1"), (8, "i", "i - 1")]), format!("corrections {got:?}"))?;
    let alternates = j["alternates"].as_array().cloned().unwrap_or_default();
    check(alternates.len() == 1, format!("{} alternates", alternates.len()))?;
    let alt = corrections(&alternates[0]);
    check(alt != got, "alternate repeats the first fix")?;

    // The JSON schema carries no per-alternate cost; read it from the report.
    let cfg = RunConfig {
        reference: bench("arrayReverse/reference.imp"),
        target: Target::Student(bench("arrayReverse/student.imp")),
        model: bench("arrayReverse/model.eml"),
        bounds: Bounds::default(),
        search: SearchConfig::default(),
        alternates: 1,
        level: 4,
        format: Format::Json,
        dump_tilde: false,
        timing: false,
    };
    let setup = Setup::load(&cfg)?;
    let Graded::Report { report, .. } = grade(&setup, &read("arrayReverse/student.imp"), &cfg) else {
        return Err("grading failed".into());
    };
    let alt_cost = report.alternates[0].cost;
    let secs = start.elapsed().as_secs_f64();
    let init_zero = alt.iter().any(|(l, s, n)| *l == 5 && s == "1" && n == "0");
    check(
        alt_cost == 3 && init_zero,
        format!(
            "minimal fix matches (cost 2, lines 7 and 8) but the first alternate costs {alt_cost}, loop init i -> 0 {}: {alt:?}",
            if init_zero { "present" } else { "absent" }
        ),
    )?;
    check(secs <= 60.0, format!("{secs:.1} s"))?;
    Ok(format!("cost 2 at lines 7 and 8, alternate of cost 3 with i = 0, {secs:.2} s"))
}

fn criterion_3() -> Verdict {
    let start = Instant::now();
    let instances = common::instances(0, 100, 12, 4096);
    let mut agree = 0;
    let mut fixed = 0;
    let mut first_bad = None;
    for (n, inst) in instances.iter().enumerate() {
        assert!(inst.oracle.bounds.int_bits <= 3 && inst.oracle.bounds.max_list_len <= 3);
        let got = match cegis_min(&inst.tilde, &inst.oracle, &SearchConfig::default()) {
            RepairResult::AlreadyCorrect => Some(0),
            RepairResult::Fixed(f) => Some(f.cost),
            _ => None,
        };
        let want = brute_force_min(&inst.tilde, &inst.oracle, 5);
        if got == want {
            agree += 1;
        } else if first_bad.is_none() {
            first_bad = Some(format!("instance {n}: search {got:?}, brute force {want:?}"));
        }
        fixed += usize::from(matches!(got, Some(c) if c > 0));
    }
    let secs = start.elapsed().as_secs_f64();
    check(instances.len() == 100, format!("only {} instances", instances.len()))?;
    check(agree == 100, format!("{agree}/100 agree; {}", first_bad.unwrap_or_default()))?;
    check(secs <= 60.0, format!("{secs:.1} s"))?;
    Ok(format!("100/100 minimal ({fixed} needed a fix), {secs:.2} s"))
}

fn criterion_4() -> Verdict {
    let mut done = 0;
    let mut seed = 0u64;
    let mut programs = 0;
    while done < 50 {
        seed += 1;
        let mut rng = common::rng(seed);
        let p = if seed.is_multiple_of(3) {
            common::reparse(&common::AnyGen { rng: &mut rng, vars: vec!["x", "xs", "y"] }.program(2))
        } else {
            common::reparse(&common::SafeGen { rng: &mut rng, list_param: seed.is_multiple_of(2), ints: vec![] }.program())
        };
        let model_src =
            if seed.is_multiple_of(2) { common::safe_model(&mut rng) } else { common::ModelFuzzer { rng: &mut rng }.model() };
        let Ok(model) = parse_eml(&model_src) else { continue };
        if check_well_formed(&model).is_err() {
            continue;
        }
        let Ok(t) = rewrite(&p, &model) else { continue };
        if t.sites.is_empty() || SiteForest::new(&t).stream(u32::MAX).take(20_001).count() > 20_000 {
            continue;
        }
        let mut ours: Vec<(String, u32)> = enumerate_candidates(&t, u32::MAX)
            .into_iter()
            .map(|(a, c)| (print_program(&t.instantiate(&a).unwrap().program), c))
            .collect();
        let mut direct: Vec<(String, u32)> =
            expand_program_upto(&t, u32::MAX).into_iter().map(|(p, c)| (print_program(&p), c)).collect();
        ours.sort();
        direct.sort();
        check(ours == direct, format!("seed {seed}: {} enumerated vs {} expanded", ours.len(), direct.len()))?;
        programs += ours.len();
        done += 1;
    }
    Ok(format!("50/50 tildes agree ({programs} weighted programs)"))
}

fn bundled_programs() -> Vec<PathBuf> {
    let mut files = Vec::new();
    for dir in ["computeDeriv", "arrayReverse"] {
        files.push(bench(&format!("{dir}/reference.imp")));
        files.push(bench(&format!("{dir}/student.imp")));
    }
    let mut corpus: Vec<PathBuf> = std::fs::read_dir(bench("computeDeriv/corpus")).unwrap().map(|e| e.unwrap().path()).collect();
    corpus.sort();
    files.extend(corpus);
    files
}

fn criterion_5() -> Verdict {
    let models: Vec<PathBuf> =
        ["computeDeriv/model.eml", "arrayReverse/model.eml", "arrayReverse/overview.eml"].iter().map(|m| bench(m)).collect();
    let mut pairs = 0;
    for file in bundled_programs() {
        let Ok(p) = parse_imp(&std::fs::read_to_string(&file).unwrap()) else { continue };
        for m in &models {
            let model = parse_eml(&std::fs::read_to_string(m).unwrap()).map_err(|e| e.to_string())?;
            let t = rewrite(&p, &model).map_err(|e| e.to_string())?;
            let c = t.instantiate(&default_assignment(&t)).unwrap();
            check(
                c.cost == 0 && print_program(&c.program) == print_program(&p),
                format!("default of {} under {} differs", name(&file), name(m)),
            )?;
            pairs += 1;
        }
    }
    let rejected = parse_eml("rule R: v[a] -> {(v[a])' + 1}").map(|m| check_well_formed(&m).is_err());
    let accepted = parse_eml("rule R: v[a] -> {v'[a'] + 1}").map(|m| check_well_formed(&m).is_ok());
    check(rejected == Ok(true), "v[a] -> {(v[a])'+1} is not rejected")?;
    check(accepted == Ok(true), "v[a] -> {v'[a']+1} is not accepted")?;
    let mut fuzzed = 0;
    let mut deepest = 0;
    let mut seed = 0u64;
    while fuzzed < 1000 {
        seed += 1;
        let mut rng = common::rng(seed);
        let Ok(model) = parse_eml(&common::ModelFuzzer { rng: &mut rng }.model()) else { continue };
        if check_well_formed(&model).is_err() {
            continue;
        }
        let p = common::reparse(&common::AnyGen { rng: &mut rng, vars: vec!["x", "xs", "y"] }.program(3));
        let (t, stats) = rewrite_with_stats(&p, std::sync::Arc::new(model)).map_err(|e| format!("seed {seed}: {e}"))?;
        check(stats.max_depth <= 4 * stats.program_size + 64, format!("seed {seed}: depth {}", stats.max_depth))?;
        let c = t.instantiate(&default_assignment(&t)).unwrap();
        check(print_program(&c.program) == print_program(&p), format!("seed {seed}: default differs"))?;
        deepest = deepest.max(stats.max_depth);
        fuzzed += 1;
    }
    Ok(format!("{pairs} program/model pairs, both definition examples, 1000 fuzzed models (deepest rewrite {deepest})"))
}

fn name(p: &Path) -> String {
    p.strip_prefix(root()).unwrap_or(p).display().to_string()
}

fn criterion_6() -> Verdict {
    let p = parse_imp("def f_list_int(xs_list_int):\n    return xs_list_int\n").unwrap();
    let sig = parse_signature(p.entry_fn()).map_err(|e| e.to_string())?;
    let b = Bounds { int_bits: 4, max_list_len: 4, ..Bounds::default() };
    let counted = input_count(&sig, &b);
    let listed = enumerate_inputs(&sig, &b).len();
    check(counted == 69905 && listed == 69905, format!("count {counted}, enumerated {listed}"))?;
    check(counted > 1 << 16, "not more than 2^16")?;
    Ok("69905 inputs, more than 2^16".into())
}

fn criterion_7() -> Verdict {
    let start = Instant::now();
    let (code, out) = run(&corpus_args(), 1);
    let secs = start.elapsed().as_secs_f64();
    let j: Json = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    check(code == 0, format!("exit {code}"))?;
    let s = &j["summary"];
    let buggy = s["total"].as_u64().unwrap() - s["correct"].as_u64().unwrap() - s["parse_error"].as_u64().unwrap();
    let pct = s["fixed_pct"].as_f64().unwrap();
    check(buggy >= 12, format!("only {buggy} buggy variants"))?;
    check(pct >= 80.0, format!("fixed_pct {pct}"))?;
    check(secs <= 600.0, format!("{secs:.1} s"))?;
    Ok(format!("{} of {buggy} buggy variants fixed ({pct}%), {} parse error, {secs:.2} s", s["fixed"], s["parse_error"]))
}

fn criterion_8() -> Verdict {
    let runs = [
        ("criterion 1", single_args("computeDeriv", &[])),
        ("criterion 2", single_args("arrayReverse", &["--alternates", "1"])),
        ("criterion 7", corpus_args()),
    ];
    for (what, args) in &runs {
        let one = run(args, 1);
        let eight = run(args, 8);
        check(one == eight, format!("{what}: output differs between 1 and 8 jobs"))?;
        check(one.1.starts_with('{'), format!("{what}: no JSON"))?;
    }
    Ok("JSON of criteria 1, 2 and 7 identical for 1 and 8 jobs".into())
}

fn main() {
    let criteria: [(u32, fn() -> Verdict); 8] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
    ];
    let mut failed = 0;
    for (n, f) in criteria {
        match f() {
            Ok(detail) => println!("criterion {n}: PASS ({detail})"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n}: FAIL ({detail})");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
