// SPDX-License-Identifier: Apache-2.0

mod common;

use autofix_core::eml::{parse_eml, rewrite};
use autofix_core::feedback::*;
use autofix_core::imp::*;
use autofix_core::search::*;
use autofix_core::tilde::{enumerate_candidates, Assignment, TildeProgram};
use proptest::prelude::*;
use serde_json::Value as Json;

fn bench(rel: &str) -> String {
    let p = std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../benchmarks").join(rel);
    std::fs::read_to_string(p).unwrap()
}

fn compute_deriv() -> (TildeProgram, ReferenceOracle) {
    let o = ReferenceOracle::new(&parse_imp(&bench("computeDeriv/reference.imp")).unwrap(), Bounds::default()).unwrap();
    let p = parse_imp_with(&bench("computeDeriv/student.imp"), &o.library_names()).unwrap();
    let t = rewrite(&p, &parse_eml(&bench("computeDeriv/model.eml")).unwrap()).unwrap();
    (t, o)
}

fn fixed_report() -> (TildeProgram, FeedbackReport, Fix) {
    let (t, o) = compute_deriv();
    let r = cegis_min(&t, &o, &SearchConfig::default());
    let fix = r.fix().cloned().unwrap();
    let alt = next_alternate(std::slice::from_ref(&fix), &t, &o, &SearchConfig::default()).fix().cloned().unwrap();
    (t.clone(), FeedbackReport::new(&t, &r, &[alt]), fix)
}

#[test]
fn compute_deriv_corrections() {
    let (t, report, fix) = fixed_report();
    let cs = diff_corrections(&t, &fix.assignment);
    let summary: Vec<(u32, &str, &str, &str)> =
        cs.iter().map(|c| (c.line, c.orig.as_str(), c.sub.as_str(), c.new.as_str())).collect();
    assert_eq!(
        summary,
        [
            (5, "return deriv", "deriv", "[0]"),
            (6, "for expo in range (0, len(poly))", "0", "1"),
            (7, "if (poly[expo] == 0)", "(poly[expo] == 0)", "False"),
        ]
    );
    assert_eq!(report.corrections, cs);
    assert_eq!(report.verdict, Verdict::Fixed);
    assert_eq!(report.cost, Some(3));
}

#[test]
fn compute_deriv_text_follows_the_figure() {
    let (_, report, _) = fixed_report();
    let text = render_feedback(&report, 4, Format::Text);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "The program requires 3 changes:");
    assert_eq!(lines[1], "  * In the return statement return deriv in line 5, replace deriv by [0].");
    assert!(lines[2].contains("line 6") && lines[2].ends_with("replace 0 by 1."), "{}", lines[2]);
    assert!(lines[3].contains("line 7") && lines[3].ends_with("to False."), "{}", lines[3]);
    assert_eq!(lines[4], "cost = 3.");
    assert!(lines[5].starts_with("Alternative 1 requires"));
    assert_eq!(render_feedback(&report, 4, Format::Text), text);
}

#[test]
fn lower_levels_say_less() {
    let (_, report, _) = fixed_report();
    let one = render_feedback(&report, 1, Format::Text);
    assert!(one.contains("line 5") && !one.contains("deriv"), "{one}");
    let three = render_feedback(&report, 3, Format::Text);
    assert!(three.contains("deriv") && !three.contains("[0]"), "{three}");
}

#[test]
fn the_default_assignment_needs_no_corrections() {
    let (t, _) = compute_deriv();
    assert!(diff_corrections(&t, &Assignment::default()).is_empty());
}

#[test]
fn masked_selections_produce_nothing() {
    let p = parse_imp("def f(x, i):\n    return x[i] > 0\n").unwrap();
    let t = rewrite(&p, &parse_eml("rule I: v[a] -> v[a+1]\nrule C: a0 cop a1 -> {a0'-1, 0} cop a1'").unwrap()).unwrap();
    let cmp = t.sites.iter().find(|s| s.parent.is_none()).unwrap().id;
    let inner = t.sites.iter().find(|s| s.parent == Some((cmp, 1))).unwrap().id;
    assert!(diff_corrections(&t, &Assignment::from_pairs([(inner, 1)])).is_empty());
    let cs = diff_corrections(&t, &Assignment::from_pairs([(cmp, 1), (inner, 1)]));
    assert_eq!(cs.len(), 1);
    assert_eq!((cs[0].sub.as_str(), cs[0].new.as_str()), ("x[i]", "x[i + 1] - 1"));
}

#[test]
fn generic_message_for_rules_without_one() {
    let p = parse_imp("def f(x):\n    y = 3\n    return y\n").unwrap();
    let t = rewrite(&p, &parse_eml("rule N: v = n -> v = 0").unwrap()).unwrap();
    let cs = diff_corrections(&t, &Assignment::from_pairs([(0, 1)]));
    assert_eq!(cs[0].message, "In line 2, replace 3 by 0.");
    assert_eq!(cs[0].rule, "N");
}

#[test]
fn statement_insertion_is_reported_at_the_first_body_line() {
    let src = "def f(n):\n    r = n\n    return r\n";
    let p = parse_imp(src).unwrap();
    let t = rewrite(&p, &parse_eml("rule B: def f(a): s -> def f(a): if a == 0: return 1; s'").unwrap()).unwrap();
    let (a, _) = &enumerate_candidates(&t, 1)[1];
    let cs = diff_corrections(&t, a);
    assert_eq!(cs.len(), 1);
    assert_eq!(cs[0].line, 2);
    let fixed = apply_corrections(src, &cs);
    assert_eq!(print_program(&parse_imp(&fixed).unwrap()), print_program(&t.instantiate(a).unwrap().program));
}

#[test]
fn verdict_texts() {
    let (t, o) = compute_deriv();
    let correct = FeedbackReport::new(&t, &RepairResult::AlreadyCorrect, &[]);
    for level in 1..=4 {
        assert_eq!(render_feedback(&correct, level, Format::Text), "No corrections needed. cost = 0.\n");
    }
    assert!(correct.corrections.is_empty());
    let none = FeedbackReport::new(&t, &RepairResult::NoFixWithinK { k: 2, stats: SearchStats::default() }, &[]);
    assert_eq!(render_feedback(&none, 4, Format::Text), "No fix found within cost 2.\n");
    assert_eq!(none.verdict.name(), "no-fix");
    let budget = cegis_min(&t, &o, &SearchConfig { budget_candidates: 3, ..SearchConfig::default() });
    let b = FeedbackReport::new(&t, &budget, &[]);
    assert_eq!(b.verdict.name(), "budget");
    assert!(b.corrections.is_empty());
}

fn strip(j: &Json, other: &Json) -> bool {
    // Whether `j` is `other` with some object fields removed.
    match (j, other) {
        (Json::Object(a), Json::Object(b)) => a.iter().all(|(k, v)| b.get(k).is_some_and(|w| strip(v, w))),
        (Json::Array(a), Json::Array(b)) => a.len() == b.len() && a.iter().zip(b).all(|(x, y)| strip(x, y)),
        _ => j == other,
    }
}

#[test]
fn json_levels_are_projections() {
    let (_, report, _) = fixed_report();
    let levels: Vec<Json> = (1..=4).map(|l| serde_json::from_str(&render_feedback(&report, l, Format::Json)).unwrap()).collect();
    for w in levels.windows(2) {
        assert!(strip(&w[0], &w[1]));
        assert_ne!(w[0], w[1]);
    }
    let c = &levels[3]["corrections"][0];
    for key in ["line", "orig", "sub", "new", "rule", "message"] {
        assert!(c.get(key).is_some(), "{key}");
    }
    assert_eq!(levels[0]["corrections"][0].as_object().unwrap().keys().collect::<Vec<_>>(), ["line"]);
    let text = render_feedback(&report, 4, Format::Json);
    assert!(text.ends_with("}\n"));
    let keys: Vec<&String> = levels[3].as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn applying_corrections_rebuilds_the_candidate(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let p = common::reparse(&common::SafeGen { rng: &mut rng, list_param: seed.is_multiple_of(2), ints: vec![] }.program());
        let t = rewrite(&p, &parse_eml(&common::safe_model(&mut rng)).unwrap()).unwrap();
        for (a, _) in enumerate_candidates(&t, 3).into_iter().take(300) {
            let cs = diff_corrections(&t, &a);
            let fixed = apply_corrections(&p.source, &cs);
            let reparsed = parse_imp(&fixed);
            prop_assert!(reparsed.is_ok(), "{}", fixed);
            let want = print_program(&t.instantiate(&a).unwrap().program);
            prop_assert_eq!(print_program(&reparsed.unwrap()), want);
            prop_assert!(cs.windows(2).all(|w| (w[0].line, w[0].col) <= (w[1].line, w[1].col)));
        }
    }
}
