// SPDX-License-Identifier: Apache-2.0

//! Line-anchored corrections read off a winning assignment, and their
//! rendering at four cumulative levels of detail.

use std::fmt::Write as _;

use serde_json::{json, Map, Value as Json};

use crate::imp::ast::{self, *};
use crate::imp::printer::{child_precedences, print_block, print_expr_in, PREC_COND};
use crate::search::{BudgetKind, Fix, RepairResult};
use crate::tilde::{Assignment, Fragment, TildeProgram};

/// Message used for rules without a `msg` clause.
pub const GENERIC_MESSAGE: &str = "In line {line}, replace {sub} by {new}.";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Correction {
    pub line: u32,
    pub col: u32,
    /// Source text of the statement holding the change (header line only
    /// for compound statements).
    pub orig: String,
    /// Source text of the node the rule matched.
    pub site: String,
    /// Source text of the smallest part that changes.
    pub sub: String,
    /// Replacement for `sub`.
    pub new: String,
    pub rule: String,
    pub message: String,
    /// Byte range of `sub` in the student source.
    pub start: usize,
    pub end: usize,
}

/// One correction per active selection that is not nested inside another
/// selected alternative, sorted by line and column.
pub fn diff_corrections(tilde: &TildeProgram, a: &Assignment) -> Vec<Correction> {
    let a = tilde.canonical(a);
    let picks = a.dense(tilde.sites.len());
    let zeros = vec![0u16; tilde.sites.len()];
    let source: &str = &tilde.original.source;
    let mut out = Vec::new();
    for (&site, &alt) in &a.0 {
        if !outermost(tilde, site) {
            continue;
        }
        let s = &tilde.sites[site];
        let old = tilde.resolve_fragment(&s.alternatives[0].fragment, &zeros);
        let new = tilde.resolve_fragment(&s.alternatives[alt as usize].fragment, &picks);
        let rule = s.alternatives[alt as usize].rule.clone().unwrap_or_default();
        let change = match (&old, &new) {
            (Fragment::Expr(o), Fragment::Expr(n)) => {
                let prec = slot_precedence(&tilde.original, s.span);
                narrow_expr(o, n, prec)
            }
            (Fragment::Block(o), Fragment::Block(n)) => narrow_block(o, n, source),
            _ => None,
        };
        let Some(change) = change else { continue };
        let orig = enclosing_stmt(&tilde.original, s.span).map(|st| head_text(source, st)).unwrap_or_default();
        let site_text = match &old {
            Fragment::Expr(_) => slice(source, s.span.start as usize, s.span.end as usize),
            Fragment::Block(b) => b.first().map(|st| head_text(source, st)).unwrap_or_default(),
        };
        let template = tilde.model.rule(&rule).and_then(|r| r.message.clone()).unwrap_or_else(|| GENERIC_MESSAGE.to_string());
        let mut c = Correction {
            line: change.line,
            col: change.col,
            orig,
            site: site_text,
            sub: slice(source, change.start, change.end),
            new: change.text,
            rule,
            message: String::new(),
            start: change.start,
            end: change.end,
        };
        c.message = render_message(&template, &c);
        out.push(c);
    }
    out.sort_by_key(|c| (c.line, c.col, c.start));
    out
}

/// Applies each correction's replacement to `source`.
pub fn apply_corrections(source: &str, corrections: &[Correction]) -> String {
    let mut cs: Vec<&Correction> = corrections.iter().collect();
    cs.sort_by_key(|c| std::cmp::Reverse(c.start));
    let mut out = source.to_string();
    for c in cs {
        out.replace_range(c.start..c.end, &c.new);
    }
    out
}

fn outermost(tilde: &TildeProgram, site: SiteId) -> bool {
    let mut cur = site;
    while let Some((p, y)) = tilde.sites[cur].parent {
        if y != 0 {
            return false;
        }
        cur = p;
    }
    true
}

fn render_message(template: &str, c: &Correction) -> String {
    template
        .replace("{line}", &c.line.to_string())
        .replace("{orig}", &c.orig)
        .replace("{site}", &c.site)
        .replace("{sub}", &c.sub)
        .replace("{new}", &c.new)
}

fn slice(source: &str, start: usize, end: usize) -> String {
    source.get(start..end).unwrap_or("").to_string()
}

/// The statement's first source line, trimmed, without a trailing colon.
fn head_text(source: &str, s: &Stmt) -> String {
    let start = s.span.start as usize;
    let rest = source.get(start..).unwrap_or("");
    let line = rest.lines().next().unwrap_or("").trim_end();
    line.strip_suffix(':').unwrap_or(line).trim_end().to_string()
}

struct Change {
    start: usize,
    end: usize,
    line: u32,
    col: u32,
    text: String,
}

impl Change {
    fn expr(old: &Expr, new: &Expr, prec: u8) -> Change {
        Change {
            start: old.span.start as usize,
            end: old.span.end as usize,
            line: old.span.line,
            col: old.span.col,
            text: print_expr_in(new, prec),
        }
    }
}

/// Same node kind and payload, ignoring children.
fn same_shape(a: &Expr, b: &Expr) -> bool {
    use ExprKind::*;
    match (&a.kind, &b.kind) {
        (List(x), List(y)) | (Tuple(x), Tuple(y)) => x.len() == y.len(),
        (Index(..), Index(..)) | (Not(_), Not(_)) | (CondExpr { .. }, CondExpr { .. }) => true,
        (Slice(_, l1, h1), Slice(_, l2, h2)) => l1.is_some() == l2.is_some() && h1.is_some() == h2.is_some(),
        (BinOp(_, o1, _), BinOp(_, o2, _)) => o1 == o2,
        (Compare(_, o1, _), Compare(_, o2, _)) => o1 == o2,
        (BoolOp(_, o1, _), BoolOp(_, o2, _)) => o1 == o2,
        (Call { func: f1, args: a1, method: m1 }, Call { func: f2, args: a2, method: m2 }) => {
            f1 == f2 && m1 == m2 && a1.len() == a2.len()
        }
        _ => false,
    }
}

fn narrow_expr(old: &Expr, new: &Expr, prec: u8) -> Option<Change> {
    if old == new {
        return None;
    }
    if same_shape(old, new) {
        let (oc, nc) = (old.children(), new.children());
        let diff: Vec<usize> = (0..oc.len()).filter(|&i| oc[i] != nc[i]).collect();
        if let [i] = diff[..] {
            return narrow_expr(oc[i], nc[i], child_precedences(old)[i]);
        }
    }
    Some(Change::expr(old, new, prec))
}

fn narrow_stmt(old: &Stmt, new: &Stmt, source: &str) -> Option<Change> {
    use StmtKind::*;
    if old == new {
        return None;
    }
    let one = |pairs: Vec<(&ast::Expr, &ast::Expr)>| {
        let diff: Vec<_> = pairs.into_iter().filter(|(o, n)| o != n).collect();
        match diff[..] {
            [(o, n)] => narrow_expr(o, n, PREC_COND),
            _ => None,
        }
    };
    let found = match (&old.kind, &new.kind) {
        (Assign(t1, e1), Assign(t2, e2)) => one(vec![(t1, t2), (e1, e2)]),
        (AugAssign(t1, o1, e1), AugAssign(t2, o2, e2)) if o1 == o2 => one(vec![(t1, t2), (e1, e2)]),
        (Expr(a), Expr(b)) | (Return(a), Return(b)) => narrow_expr(a, b, PREC_COND),
        (If(c1, t1, e1), If(c2, t2, e2)) => match (c1 == c2, t1 == t2, e1 == e2) {
            (false, true, true) => narrow_expr(c1, c2, PREC_COND),
            (true, false, true) => narrow_block(t1, t2, source),
            (true, true, false) if !e1.is_empty() => narrow_block(e1, e2, source),
            _ => None,
        },
        (While(c1, b1), While(c2, b2)) | (For(_, c1, b1), For(_, c2, b2))
            if std::mem::discriminant(&old.kind) == std::mem::discriminant(&new.kind) =>
        {
            let same_var = match (&old.kind, &new.kind) {
                (For(v1, ..), For(v2, ..)) => v1 == v2,
                _ => true,
            };
            match (same_var, c1 == c2, b1 == b2) {
                (true, false, true) => narrow_expr(c1, c2, PREC_COND),
                (true, true, false) => narrow_block(b1, b2, source),
                _ => None,
            }
        }
        _ => None,
    };
    found.or_else(|| Some(replace_stmts(std::slice::from_ref(old), std::slice::from_ref(new))))
}

fn narrow_block(old: &[Stmt], new: &[Stmt], source: &str) -> Option<Change> {
    if old == new {
        return None;
    }
    let pre = old.iter().zip(new).take_while(|(a, b)| a == b).count();
    let max_suf = old.len().min(new.len()) - pre;
    let suf = old.iter().rev().zip(new.iter().rev()).take(max_suf).take_while(|(a, b)| a == b).count();
    let (o, n) = (&old[pre..old.len() - suf], &new[pre..new.len() - suf]);
    if let ([a], [b]) = (o, n) {
        return narrow_stmt(a, b, source);
    }
    if o.is_empty() {
        // Pure insertion before the next surviving statement, or after the
        // previous one.
        let text_of = |indent_col: u32| indented(n, indent_col);
        return Some(match old.get(pre) {
            Some(next) => Change {
                start: next.span.start as usize,
                end: next.span.start as usize,
                line: next.span.line,
                col: next.span.col,
                text: format!("{}\n{}", text_of(next.span.col), " ".repeat(next.span.col as usize - 1)),
            },
            None => {
                let prev = &old[pre - 1];
                let end = stmt_end(prev);
                Change {
                    start: end,
                    end,
                    line: prev.span.line,
                    col: prev.span.col,
                    text: format!("\n{}{}", " ".repeat(prev.span.col as usize - 1), text_of(prev.span.col)),
                }
            }
        });
    }
    Some(replace_stmts(o, n))
}

/// `stmts` printed with continuation lines indented to `col`.
fn indented(stmts: &[Stmt], col: u32) -> String {
    let text = print_block(stmts, 0);
    let base = " ".repeat(col.saturating_sub(1) as usize);
    let mut out = String::new();
    for (i, l) in text.lines().enumerate() {
        if i > 0 {
            out.push('\n');
            out.push_str(&base);
        }
        out.push_str(l);
    }
    out
}

fn replace_stmts(old: &[Stmt], new: &[Stmt]) -> Change {
    let first = &old[0];
    let end = old.iter().map(stmt_end).max().unwrap_or(first.span.end as usize);
    let text = if new.is_empty() { "pass".to_string() } else { indented(new, first.span.col) };
    Change { start: first.span.start as usize, end, line: first.span.line, col: first.span.col, text }
}

/// Byte offset one past the last character of a statement, nested blocks
/// included.
fn stmt_end(s: &Stmt) -> usize {
    use StmtKind::*;
    let e = |x: &ast::Expr| x.span.end as usize;
    let b = |xs: &[Stmt]| xs.iter().map(stmt_end).max().unwrap_or(0);
    let own = s.span.end as usize;
    own.max(match &s.kind {
        Assign(t, v) | AugAssign(t, _, v) => e(t).max(e(v)),
        Expr(x) | Return(x) => e(x),
        If(c, t, f) => e(c).max(b(t)).max(b(f)),
        While(c, body) | For(_, c, body) => e(c).max(b(body)),
        Pass | Choice(_) => 0,
    })
}

fn contains(outer: Span, inner: Span) -> bool {
    outer.start <= inner.start && inner.end <= outer.end
}

fn direct_exprs(s: &Stmt) -> Vec<&Expr> {
    use StmtKind::*;
    match &s.kind {
        Assign(t, e) | AugAssign(t, _, e) => vec![t, e],
        Expr(e) | Return(e) | If(e, ..) | While(e, _) | For(_, e, _) => vec![e],
        Pass | Choice(_) => vec![],
    }
}

fn blocks(s: &Stmt) -> Vec<&[Stmt]> {
    use StmtKind::*;
    match &s.kind {
        If(_, t, e) => vec![t, e],
        While(_, b) | For(_, _, b) => vec![b],
        _ => vec![],
    }
}

fn find_stmt(block: &[Stmt], span: Span) -> Option<&Stmt> {
    for s in block {
        if s.span.same(&span) || direct_exprs(s).iter().any(|e| contains(e.span, span)) {
            return Some(s);
        }
        if let Some(found) = blocks(s).into_iter().find_map(|b| find_stmt(b, span)) {
            return Some(found);
        }
    }
    None
}

fn enclosing_stmt(p: &Program, span: Span) -> Option<&Stmt> {
    p.functions.iter().find_map(|f| find_stmt(&f.body, span))
}

/// Precedence the slot holding the node at `span` demands of its content.
fn slot_precedence(p: &Program, span: Span) -> u8 {
    fn walk(e: &Expr, span: Span) -> Option<u8> {
        let kids = e.children();
        let precs = child_precedences(e);
        for (i, c) in kids.iter().enumerate() {
            if c.span.same(&span) {
                return Some(precs[i]);
            }
            if contains(c.span, span) {
                if let Some(p) = walk(c, span) {
                    return Some(p);
                }
            }
        }
        None
    }
    enclosing_stmt(p, span)
        .and_then(|s| direct_exprs(s).into_iter().find_map(|e| if e.span.same(&span) { None } else { walk(e, span) }))
        .unwrap_or(PREC_COND)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Correct,
    Fixed,
    NoFix { k: u32 },
    Budget(BudgetKind),
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Correct => "correct",
            Verdict::Fixed => "fixed",
            Verdict::NoFix { .. } => "no-fix",
            Verdict::Budget(_) => "budget",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlternateFix {
    pub cost: u32,
    pub corrections: Vec<Correction>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReportStats {
    pub candidates_tested: u64,
    pub cexs: usize,
    pub millis: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeedbackReport {
    pub verdict: Verdict,
    /// Known for `correct` and `fixed` only.
    pub cost: Option<u32>,
    pub corrections: Vec<Correction>,
    pub alternates: Vec<AlternateFix>,
    pub stats: ReportStats,
}

impl FeedbackReport {
    pub fn new(tilde: &TildeProgram, result: &RepairResult, alternates: &[Fix]) -> FeedbackReport {
        let stats = result.stats();
        let stats = ReportStats { candidates_tested: stats.candidates_tested, cexs: stats.cexs, millis: 0 };
        let (verdict, cost, corrections) = match result {
            RepairResult::AlreadyCorrect => (Verdict::Correct, Some(0), Vec::new()),
            RepairResult::Fixed(f) => (Verdict::Fixed, Some(f.cost), diff_corrections(tilde, &f.assignment)),
            RepairResult::NoFixWithinK { k, .. } => (Verdict::NoFix { k: *k }, None, Vec::new()),
            RepairResult::Budget { kind, .. } => (Verdict::Budget(*kind), None, Vec::new()),
        };
        let alternates = alternates
            .iter()
            .map(|f| AlternateFix { cost: f.cost, corrections: diff_corrections(tilde, &f.assignment) })
            .collect();
        FeedbackReport { verdict, cost, corrections, alternates, stats }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

/// Feedback at `level` 1 to 4 (clamped).
pub fn render_feedback(report: &FeedbackReport, level: u8, format: Format) -> String {
    let level = level.clamp(1, 4);
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report_json(report, level)).expect("serializable report");
            s.push('\n');
            s
        }
        Format::Text => render_text(report, level),
    }
}

pub fn report_json(report: &FeedbackReport, level: u8) -> Json {
    let list = |cs: &[Correction]| Json::Array(cs.iter().map(|c| correction_json(c, level)).collect());
    json!({
        "verdict": report.verdict.name(),
        "cost": report.cost,
        "corrections": list(&report.corrections),
        "alternates": report.alternates.iter().map(|a| list(&a.corrections)).collect::<Vec<_>>(),
        "stats": {
            "candidates_tested": report.stats.candidates_tested,
            "cexs": report.stats.cexs,
            "millis": report.stats.millis,
        },
    })
}

fn correction_json(c: &Correction, level: u8) -> Json {
    let mut m = Map::new();
    m.insert("line".into(), json!(c.line));
    if level >= 2 {
        m.insert("orig".into(), json!(c.orig));
    }
    if level >= 3 {
        m.insert("sub".into(), json!(c.sub));
    }
    if level >= 4 {
        m.insert("new".into(), json!(c.new));
        m.insert("rule".into(), json!(c.rule));
        m.insert("message".into(), json!(c.message));
    }
    Json::Object(m)
}

fn bullet(c: &Correction, level: u8) -> String {
    match level {
        1 => format!("There is an error in line {}.", c.line),
        2 => format!("There is an error in line {}, in {}.", c.line, c.orig),
        3 => format!("In {} in line {}, {} needs to change.", c.orig, c.line, c.sub),
        _ => c.message.clone(),
    }
}

fn changes(n: usize) -> String {
    if n == 1 {
        "1 change".to_string()
    } else {
        format!("{n} changes")
    }
}

fn render_text(report: &FeedbackReport, level: u8) -> String {
    let mut out = String::new();
    match report.verdict {
        Verdict::Correct => out.push_str("No corrections needed. cost = 0.\n"),
        Verdict::NoFix { k } => {
            let _ = writeln!(out, "No fix found within cost {k}.");
        }
        Verdict::Budget(kind) => {
            let what = match kind {
                BudgetKind::Candidates => "candidate budget",
                BudgetKind::Timeout => "time budget",
            };
            let _ = writeln!(out, "The search stopped at its {what} without finding a fix.");
        }
        Verdict::Fixed => {
            let _ = writeln!(out, "The program requires {}:", changes(report.corrections.len()));
            for c in &report.corrections {
                let _ = writeln!(out, "  * {}", bullet(c, level));
            }
            let _ = writeln!(out, "cost = {}.", report.cost.unwrap_or(0));
            for (i, alt) in report.alternates.iter().enumerate() {
                let _ = writeln!(out, "Alternative {} requires {}:", i + 1, changes(alt.corrections.len()));
                for c in &alt.corrections {
                    let _ = writeln!(out, "  * {}", bullet(c, level));
                }
                let _ = writeln!(out, "cost = {}.", alt.cost);
            }
        }
    }
    out
}
