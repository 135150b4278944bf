// SPDX-License-Identifier: Apache-2.0

use std::sync::Arc;

use super::matching::{match_pattern, resolve_arith, resolve_cmp, Binding, Node, Substitution};
use super::syntax::*;
use super::wellformed::check_well_formed;
use super::EmlError;
use crate::imp::ast::*;
use crate::tilde::{Alternative, ChoiceSite, Fragment, TildeProgram};

/// Instrumentation of one rewrite run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RewriteStats {
    /// Deepest nesting of rewrite calls, counting the top-level node as 1.
    pub max_depth: usize,
    /// Number of successful rule matches.
    pub applications: usize,
    /// Size of the input program.
    pub program_size: usize,
}

/// Upper bound on the number of choice sites a single rewrite may create.
pub const MAX_SITES: usize = 200_000;

pub fn rewrite(program: &Program, model: &ErrorModel) -> Result<TildeProgram, EmlError> {
    rewrite_with_stats(program, Arc::new(model.clone())).map(|(t, _)| t)
}

pub fn rewrite_with_stats(program: &Program, model: Arc<ErrorModel>) -> Result<(TildeProgram, RewriteStats), EmlError> {
    check_well_formed(&model).map_err(EmlError::IllFormedModel)?;
    let size = program.size();
    let mut rw = Rewriter {
        model: &model,
        sites: Vec::new(),
        depth: 0,
        depth_cap: 4 * size + 64,
        stats: RewriteStats { program_size: size, ..RewriteStats::default() },
        scope: Scope::default(),
    };
    let mut functions = Vec::with_capacity(program.functions.len());
    for f in &program.functions {
        rw.scope = Scope::of(f);
        functions.push(rw.func(f)?);
    }
    let stats = rw.stats;
    let (functions, sites) = renumber(functions, rw.sites);
    let root = Program { functions, entry: program.entry, source: program.source.clone() };
    let tilde = TildeProgram { root, sites, original: program.clone(), model: model.clone() };
    Ok((tilde, stats))
}

/// Variables visible at a byte offset of one function: its parameters, then
/// every variable assigned lexically before, in order of first assignment.
#[derive(Clone, Debug, Default)]
struct Scope {
    params: Vec<String>,
    defs: Vec<(u32, String)>,
}

impl Scope {
    fn of(f: &FuncDef) -> Scope {
        let mut defs = Vec::new();
        collect_defs(&f.body, &mut defs);
        defs.sort_by_key(|d| d.0);
        Scope { params: f.params.clone(), defs }
    }

    fn vars_at(&self, pos: u32) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        let later = self.defs.iter().filter(|d| d.0 <= pos).map(|d| &d.1);
        for v in self.params.iter().chain(later) {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
        out
    }
}

fn collect_defs(b: &[Stmt], out: &mut Vec<(u32, String)>) {
    for s in b {
        match &s.kind {
            StmtKind::Assign(t, _) | StmtKind::AugAssign(t, _, _) => {
                if let Some(v) = t.is_var() {
                    out.push((s.span.end, v.to_string()));
                }
            }
            StmtKind::If(_, t, f) => {
                collect_defs(t, out);
                collect_defs(f, out);
            }
            StmtKind::While(_, body) => collect_defs(body, out),
            StmtKind::For(v, it, body) => {
                out.push((it.span.end, v.clone()));
                collect_defs(body, out);
            }
            _ => {}
        }
    }
}

struct Rewriter<'m> {
    model: &'m ErrorModel,
    /// Sites under construction, indexed by temporary id.
    sites: Vec<ChoiceSite>,
    depth: usize,
    depth_cap: usize,
    stats: RewriteStats,
    scope: Scope,
}

/// What a template is being instantiated for.
struct Ctx<'c> {
    rule: &'c CorrectionRule,
    sub: &'c Substitution,
    anchor: Span,
}

type R<T> = Result<T, EmlError>;

impl Rewriter<'_> {
    fn enter(&mut self) -> R<()> {
        self.depth += 1;
        self.stats.max_depth = self.stats.max_depth.max(self.depth);
        if self.depth > self.depth_cap {
            return Err(EmlError::RewriteLimit(format!("rewrite nesting exceeded {}", self.depth_cap)));
        }
        Ok(())
    }

    fn site(&mut self, span: Span, alternatives: Vec<Alternative>, synthetic: bool) -> R<SiteId> {
        if self.sites.len() >= MAX_SITES {
            return Err(EmlError::RewriteLimit(format!("more than {MAX_SITES} choice sites")));
        }
        let id = self.sites.len();
        self.sites.push(ChoiceSite { id, span, alternatives, parent: None, synthetic });
        Ok(id)
    }

    fn default_alt(fragment: Fragment) -> Alternative {
        Alternative { fragment, rule: None, weight: 0 }
    }

    fn func(&mut self, f: &FuncDef) -> R<FuncDef> {
        self.enter()?;
        let body = self.block(&f.body)?;
        let mut alts = vec![Self::default_alt(Fragment::Block(body.clone()))];
        let model = self.model;
        for rule in &model.rules {
            let (Pattern::Func { .. }, Template::Func(seq)) = (&rule.lhs, &rule.rhs) else { continue };
            let Some(sub) = match_pattern(&rule.lhs, Node::Func(f)) else { continue };
            self.stats.applications += 1;
            let cx = Ctx { rule, sub: &sub, anchor: f.span };
            for v in variants_seq(seq) {
                let built = self.build_seq(&v, &cx)?;
                alts.push(Alternative { fragment: Fragment::Block(built), rule: Some(rule.id.clone()), weight: rule.weight });
            }
        }
        self.depth -= 1;
        let body = if alts.len() == 1 {
            body
        } else {
            let id = self.site(f.span, alts, false)?;
            vec![Stmt::new(StmtKind::Choice(id), f.span)]
        };
        Ok(FuncDef { body, ..f.clone() })
    }

    fn block(&mut self, b: &[Stmt]) -> R<Vec<Stmt>> {
        b.iter().map(|s| self.stmt(s)).collect()
    }

    fn stmt(&mut self, s: &Stmt) -> R<Stmt> {
        self.enter()?;
        let kind = match &s.kind {
            StmtKind::Assign(t, e) => StmtKind::Assign(self.expr(t)?, self.expr(e)?),
            StmtKind::AugAssign(t, op, e) => StmtKind::AugAssign(self.expr(t)?, *op, self.expr(e)?),
            StmtKind::Expr(e) => StmtKind::Expr(self.expr(e)?),
            StmtKind::Return(e) => StmtKind::Return(self.expr(e)?),
            StmtKind::If(c, t, f) => StmtKind::If(self.expr(c)?, self.block(t)?, self.block(f)?),
            StmtKind::While(c, b) => StmtKind::While(self.expr(c)?, self.block(b)?),
            StmtKind::For(v, it, b) => StmtKind::For(v.clone(), self.expr(it)?, self.block(b)?),
            StmtKind::Pass => StmtKind::Pass,
            StmtKind::Choice(_) => s.kind.clone(),
        };
        let w0 = Stmt::new(kind, s.span);
        let mut alts = Vec::new();
        let model = self.model;
        for rule in &model.rules {
            let (Pattern::Stmt(_), Template::Stmts(seq)) = (&rule.lhs, &rule.rhs) else { continue };
            let Some(sub) = match_pattern(&rule.lhs, Node::Stmt(s)) else { continue };
            self.stats.applications += 1;
            let cx = Ctx { rule, sub: &sub, anchor: s.span };
            for v in variants_seq(seq) {
                let built = self.build_seq(&v, &cx)?;
                alts.push(Alternative { fragment: Fragment::Block(built), rule: Some(rule.id.clone()), weight: rule.weight });
            }
        }
        self.depth -= 1;
        if alts.is_empty() {
            return Ok(w0);
        }
        alts.insert(0, Self::default_alt(Fragment::Block(vec![w0])));
        let id = self.site(s.span, alts, false)?;
        Ok(Stmt::new(StmtKind::Choice(id), s.span))
    }

    fn expr(&mut self, e: &Expr) -> R<Expr> {
        self.enter()?;
        let mut w0 = e.clone();
        for (slot, orig) in w0.children_mut().into_iter().zip(e.children()) {
            *slot = self.expr(orig)?;
        }
        let mut alts = Vec::new();
        let model = self.model;
        for rule in &model.rules {
            let (Pattern::Expr(_), Template::Expr(t)) = (&rule.lhs, &rule.rhs) else { continue };
            let Some(sub) = match_pattern(&rule.lhs, Node::Expr(e)) else { continue };
            self.stats.applications += 1;
            let cx = Ctx { rule, sub: &sub, anchor: e.span };
            for v in variants(t) {
                let built = self.build_expr(&v, &cx)?;
                alts.push(Alternative { fragment: Fragment::Expr(built), rule: Some(rule.id.clone()), weight: rule.weight });
            }
        }
        self.depth -= 1;
        if alts.is_empty() {
            return Ok(w0);
        }
        alts.insert(0, Self::default_alt(Fragment::Expr(w0)));
        let id = self.site(e.span, alts, false)?;
        Ok(Expr::new(ExprKind::Choice(id), e.span))
    }

    fn binding<'c>(&self, name: &str, cx: &'c Ctx<'_>) -> R<&'c Binding> {
        cx.sub.get(name).ok_or_else(|| bad(cx, format!("metavariable '{name}' is unbound")))
    }

    /// Builds a set-free template expression.
    fn build_expr(&mut self, t: &TExpr, cx: &Ctx<'_>) -> R<Expr> {
        let at = |kind| Expr::new(kind, cx.anchor);
        Ok(match t {
            TExpr::Meta { name, primed } => match self.binding(name, cx)? {
                Binding::Expr(e) if *primed => self.expr(e)?,
                Binding::Expr(e) => e.clone(),
                Binding::Name(n) => at(ExprKind::Var(n.clone())),
                _ => return Err(bad(cx, format!("metavariable '{name}' is not an expression"))),
            },
            TExpr::Int(n) => at(ExprKind::Int(*n)),
            TExpr::Bool(b) => at(ExprKind::Bool(*b)),
            TExpr::Var(v) => at(ExprKind::Var(v.clone())),
            TExpr::List(ts) => at(ExprKind::List(self.build_all(ts, cx)?)),
            TExpr::Tuple(ts) => at(ExprKind::Tuple(self.build_all(ts, cx)?)),
            TExpr::Index(b, i) => at(ExprKind::Index(self.build_box(b, cx)?, self.build_box(i, cx)?)),
            TExpr::Slice(b, lo, hi) => {
                let b = self.build_box(b, cx)?;
                let lo = lo.as_ref().map(|x| self.build_box(x, cx)).transpose()?;
                let hi = hi.as_ref().map(|x| self.build_box(x, cx)).transpose()?;
                at(ExprKind::Slice(b, lo, hi))
            }
            TExpr::BinOp(l, OpRef::Any(Some(m)), r) => {
                let bound = resolve_arith(&OpRef::Meta(m.clone()), cx.sub)
                    .ok_or_else(|| bad(cx, format!("'{m}' is not an arithmetic operator")))?;
                let ops = std::iter::once(bound).chain(ArithOp::ALL.into_iter().filter(|&o| o != bound));
                let mut alts = Vec::new();
                for op in ops {
                    let e = at(ExprKind::BinOp(self.build_box(l, cx)?, op, self.build_box(r, cx)?));
                    alts.push(e);
                }
                self.synthetic_expr(cx.anchor, alts, cx)?
            }
            TExpr::BinOp(l, op, r) => {
                let op = resolve_arith(op, cx.sub).ok_or_else(|| bad(cx, "unresolved arithmetic operator".into()))?;
                let (l, r) = (self.build_box(l, cx)?, self.build_box(r, cx)?);
                match fold_literals(&l, op, &r) {
                    Some(n) => at(ExprKind::Int(n)),
                    None => at(ExprKind::BinOp(l, op, r)),
                }
            }
            TExpr::Compare(l, OpRef::Any(Some(m)), r) => {
                let bound = resolve_cmp(&OpRef::Meta(m.clone()), cx.sub)
                    .ok_or_else(|| bad(cx, format!("'{m}' is not a comparison operator")))?;
                let ops = std::iter::once(bound).chain(CmpOp::ALL.into_iter().filter(|&o| o != bound));
                let mut alts = Vec::new();
                for op in ops {
                    alts.push(at(ExprKind::Compare(self.build_box(l, cx)?, op, self.build_box(r, cx)?)));
                }
                self.synthetic_expr(cx.anchor, alts, cx)?
            }
            TExpr::Compare(l, op, r) => {
                let op = resolve_cmp(op, cx.sub).ok_or_else(|| bad(cx, "unresolved comparison operator".into()))?;
                at(ExprKind::Compare(self.build_box(l, cx)?, op, self.build_box(r, cx)?))
            }
            TExpr::BoolOp(l, op, r) => at(ExprKind::BoolOp(self.build_box(l, cx)?, *op, self.build_box(r, cx)?)),
            TExpr::Not(a) => at(ExprKind::Not(self.build_box(a, cx)?)),
            TExpr::Call { func, args, method } => {
                at(ExprKind::Call { func: func.clone(), args: self.build_all(args, cx)?, method: *method })
            }
            TExpr::CondExpr { then, cond, els } => at(ExprKind::CondExpr {
                then: self.build_box(then, cx)?,
                cond: self.build_box(cond, cx)?,
                els: self.build_box(els, cx)?,
            }),
            TExpr::Primed(inner) => {
                let e = self.build_expr(inner, cx)?;
                self.expr(&e)?
            }
            TExpr::Scope(x) => {
                let default = match meta_kind(x) {
                    Some(_) => self.build_expr(&TExpr::Meta { name: x.clone(), primed: false }, cx)?,
                    None => at(ExprKind::Var(x.clone())),
                };
                let own = default.is_var().map(str::to_string);
                let mut alts = vec![default.clone()];
                for v in self.scope.vars_at(cx.anchor.start) {
                    if own.as_deref() != Some(&v) {
                        alts.push(Expr::new(ExprKind::Var(v), default.span));
                    }
                }
                self.synthetic_expr(default.span, alts, cx)?
            }
            TExpr::DefaultSet(d, members) => {
                let mut alts = Vec::new();
                for v in variants(d).iter().chain(members.iter().flat_map(variants).collect::<Vec<_>>().iter()) {
                    alts.push(self.build_expr(v, cx)?);
                }
                let span = alts[0].span;
                self.synthetic_expr(span, alts, cx)?
            }
            TExpr::Set(_) => return Err(bad(cx, "internal: set form left after flattening".into())),
        })
    }

    /// A site whose first expression is the zero-cost default; the others
    /// cost the rule weight. A single expression needs no site.
    fn synthetic_expr(&mut self, span: Span, mut exprs: Vec<Expr>, cx: &Ctx<'_>) -> R<Expr> {
        if exprs.len() == 1 {
            return Ok(exprs.pop().unwrap());
        }
        let alts = exprs
            .into_iter()
            .enumerate()
            .map(|(i, e)| Alternative {
                fragment: Fragment::Expr(e),
                rule: (i > 0).then(|| cx.rule.id.clone()),
                weight: if i == 0 { 0 } else { cx.rule.weight },
            })
            .collect();
        let id = self.site(span, alts, true)?;
        Ok(Expr::new(ExprKind::Choice(id), span))
    }

    fn build_box(&mut self, t: &TExpr, cx: &Ctx<'_>) -> R<Box<Expr>> {
        self.build_expr(t, cx).map(Box::new)
    }

    fn build_all(&mut self, ts: &[TExpr], cx: &Ctx<'_>) -> R<Vec<Expr>> {
        ts.iter().map(|t| self.build_expr(t, cx)).collect()
    }

    fn build_seq(&mut self, seq: &[TStmt], cx: &Ctx<'_>) -> R<Vec<Stmt>> {
        let mut out = Vec::new();
        for t in seq {
            out.extend(self.build_stmt(t, cx)?);
        }
        Ok(out)
    }

    fn build_stmt(&mut self, t: &TStmt, cx: &Ctx<'_>) -> R<Vec<Stmt>> {
        let at = |kind| Stmt::new(kind, cx.anchor);
        let one = match t {
            TStmt::Meta { name, primed } => {
                return match self.binding(name, cx)? {
                    Binding::Stmt(s) if *primed => Ok(vec![self.stmt(s)?]),
                    Binding::Stmt(s) => Ok(vec![s.clone()]),
                    Binding::Block(b) if *primed => self.block(b),
                    Binding::Block(b) => Ok(b.clone()),
                    _ => Err(bad(cx, format!("metavariable '{name}' is not a statement"))),
                }
            }
            TStmt::Assign(l, r) => at(StmtKind::Assign(self.build_expr(l, cx)?, self.build_expr(r, cx)?)),
            TStmt::AugAssign(l, OpRef::Any(Some(m)), r) => {
                let bound = resolve_arith(&OpRef::Meta(m.clone()), cx.sub)
                    .ok_or_else(|| bad(cx, format!("'{m}' is not an arithmetic operator")))?;
                let ops = std::iter::once(bound).chain(ArithOp::ALL.into_iter().filter(|&o| o != bound));
                let mut alts = Vec::new();
                for (i, op) in ops.enumerate() {
                    let s = at(StmtKind::AugAssign(self.build_expr(l, cx)?, op, self.build_expr(r, cx)?));
                    alts.push(Alternative {
                        fragment: Fragment::Block(vec![s]),
                        rule: (i > 0).then(|| cx.rule.id.clone()),
                        weight: if i == 0 { 0 } else { cx.rule.weight },
                    });
                }
                let id = self.site(cx.anchor, alts, true)?;
                at(StmtKind::Choice(id))
            }
            TStmt::AugAssign(l, op, r) => {
                let op = resolve_arith(op, cx.sub).ok_or_else(|| bad(cx, "unresolved arithmetic operator".into()))?;
                at(StmtKind::AugAssign(self.build_expr(l, cx)?, op, self.build_expr(r, cx)?))
            }
            TStmt::Expr(e) => at(StmtKind::Expr(self.build_expr(e, cx)?)),
            TStmt::Return(e) => at(StmtKind::Return(self.build_expr(e, cx)?)),
            TStmt::Pass => at(StmtKind::Pass),
            TStmt::If(c, t, f) => at(StmtKind::If(self.build_expr(c, cx)?, self.build_seq(t, cx)?, self.build_seq(f, cx)?)),
            TStmt::Set(_) => return Err(bad(cx, "internal: set form left after flattening".into())),
        };
        Ok(vec![one])
    }
}

/// `a op b` for two integer literals produced by a template, so that
/// `n+1` on `0` reads as `1`. Wraparound makes folding before or after
/// evaluation agree.
pub fn fold_literals(l: &Expr, op: ArithOp, r: &Expr) -> Option<i64> {
    let (ExprKind::Int(a), ExprKind::Int(b)) = (&l.kind, &r.kind) else { return None };
    match op {
        ArithOp::Add => a.checked_add(*b),
        ArithOp::Sub => a.checked_sub(*b),
        _ => None,
    }
}

fn bad(cx: &Ctx<'_>, msg: String) -> EmlError {
    EmlError::BadTemplate { rule: cx.rule.id.clone(), message: msg }
}

/// Cartesian product, first list varying slowest.
fn product<T: Clone>(lists: Vec<Vec<T>>) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for list in lists {
        let mut next = Vec::with_capacity(out.len() * list.len());
        for prefix in &out {
            for item in &list {
                let mut p = prefix.clone();
                p.push(item.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Flattens plain sets (and operator sets without a bound default) into
/// separate set-free templates, in member order.
pub fn variants(t: &TExpr) -> Vec<TExpr> {
    match t {
        TExpr::Set(members) => members.iter().flat_map(variants).collect(),
        TExpr::DefaultSet(..) | TExpr::Meta { .. } | TExpr::Int(_) | TExpr::Bool(_) | TExpr::Var(_) | TExpr::Scope(_) => {
            vec![t.clone()]
        }
        TExpr::Compare(l, OpRef::Any(None), r) => {
            CmpOp::ALL.iter().flat_map(|&op| variants(&TExpr::Compare(l.clone(), OpRef::Lit(op), r.clone()))).collect()
        }
        TExpr::BinOp(l, OpRef::Any(None), r) => {
            ArithOp::ALL.iter().flat_map(|&op| variants(&TExpr::BinOp(l.clone(), OpRef::Lit(op), r.clone()))).collect()
        }
        _ => {
            let kids: Vec<Vec<TExpr>> = t.children().into_iter().map(variants).collect();
            product(kids).into_iter().map(|k| rebuild(t, k)).collect()
        }
    }
}

fn rebuild(t: &TExpr, kids: Vec<TExpr>) -> TExpr {
    let mut it = kids.into_iter();
    let mut next = || Box::new(it.next().expect("child count"));
    match t {
        TExpr::List(es) => TExpr::List((0..es.len()).map(|_| *next()).collect()),
        TExpr::Tuple(es) => TExpr::Tuple((0..es.len()).map(|_| *next()).collect()),
        TExpr::Index(..) => TExpr::Index(next(), next()),
        TExpr::Slice(_, lo, hi) => {
            let b = next();
            let lo = lo.as_ref().map(|_| next());
            let hi = hi.as_ref().map(|_| next());
            TExpr::Slice(b, lo, hi)
        }
        TExpr::BinOp(_, op, _) => TExpr::BinOp(next(), op.clone(), next()),
        TExpr::Compare(_, op, _) => TExpr::Compare(next(), op.clone(), next()),
        TExpr::BoolOp(_, op, _) => TExpr::BoolOp(next(), *op, next()),
        TExpr::Not(_) => TExpr::Not(next()),
        TExpr::Primed(_) => TExpr::Primed(next()),
        TExpr::Call { func, args, method } => {
            TExpr::Call { func: func.clone(), args: (0..args.len()).map(|_| *next()).collect(), method: *method }
        }
        TExpr::CondExpr { .. } => TExpr::CondExpr { then: next(), cond: next(), els: next() },
        other => other.clone(),
    }
}

pub fn variants_seq(seq: &[TStmt]) -> Vec<Vec<TStmt>> {
    let parts: Vec<Vec<Vec<TStmt>>> = seq.iter().map(variants_stmt).collect();
    product(parts).into_iter().map(|p| p.into_iter().flatten().collect()).collect()
}

/// Each variant is a sequence, since a statement set may splice several statements.
fn variants_stmt(s: &TStmt) -> Vec<Vec<TStmt>> {
    let single = |v: Vec<TStmt>| v.into_iter().map(|s| vec![s]).collect::<Vec<_>>();
    match s {
        TStmt::Set(seqs) => seqs.iter().flat_map(|q| variants_seq(q)).collect(),
        TStmt::Meta { .. } | TStmt::Pass => vec![vec![s.clone()]],
        TStmt::Assign(l, r) => single(
            product(vec![variants(l), variants(r)]).into_iter().map(|k| TStmt::Assign(k[0].clone(), k[1].clone())).collect(),
        ),
        TStmt::AugAssign(l, OpRef::Any(None), r) => {
            ArithOp::ALL.iter().flat_map(|&op| variants_stmt(&TStmt::AugAssign(l.clone(), OpRef::Lit(op), r.clone()))).collect()
        }
        TStmt::AugAssign(l, op, r) => single(
            product(vec![variants(l), variants(r)])
                .into_iter()
                .map(|k| TStmt::AugAssign(k[0].clone(), op.clone(), k[1].clone()))
                .collect(),
        ),
        TStmt::Expr(e) => single(variants(e).into_iter().map(TStmt::Expr).collect()),
        TStmt::Return(e) => single(variants(e).into_iter().map(TStmt::Return).collect()),
        TStmt::If(c, t, f) => {
            let mut out = Vec::new();
            for c in variants(c) {
                for t in variants_seq(t) {
                    for f in variants_seq(f) {
                        out.push(vec![TStmt::If(c.clone(), t.clone(), f)]);
                    }
                }
            }
            out
        }
    }
}

/// Gives sites dense ids in pre-order of the rewritten tree (a site before
/// the contents of its alternatives, alternatives in order) and records
/// each site's enclosing site.
fn renumber(mut functions: Vec<FuncDef>, tmp: Vec<ChoiceSite>) -> (Vec<FuncDef>, Vec<ChoiceSite>) {
    let mut r = Renumber { tmp: tmp.into_iter().map(Some).collect(), out: Vec::new() };
    for f in &mut functions {
        r.block(&mut f.body, None);
    }
    let sites = r.out.into_iter().map(|s| s.expect("every site is reachable")).collect();
    (functions, sites)
}

struct Renumber {
    tmp: Vec<Option<ChoiceSite>>,
    out: Vec<Option<ChoiceSite>>,
}

impl Renumber {
    fn site(&mut self, old: SiteId, parent: Option<(SiteId, u16)>) -> SiteId {
        let id = self.out.len();
        self.out.push(None);
        let mut site = self.tmp[old].take().expect("site visited once");
        for (y, alt) in site.alternatives.iter_mut().enumerate() {
            let p = Some((id, y as u16));
            match &mut alt.fragment {
                Fragment::Expr(e) => self.expr(e, p),
                Fragment::Block(b) => self.block(b, p),
            }
        }
        site.id = id;
        site.parent = parent;
        self.out[id] = Some(site);
        id
    }

    fn expr(&mut self, e: &mut Expr, parent: Option<(SiteId, u16)>) {
        if let ExprKind::Choice(old) = e.kind {
            e.kind = ExprKind::Choice(self.site(old, parent));
            return;
        }
        for c in e.children_mut() {
            self.expr(c, parent);
        }
    }

    fn block(&mut self, b: &mut [Stmt], parent: Option<(SiteId, u16)>) {
        for s in b {
            match &mut s.kind {
                StmtKind::Choice(old) => {
                    let id = self.site(*old, parent);
                    s.kind = StmtKind::Choice(id);
                }
                StmtKind::Assign(t, e) | StmtKind::AugAssign(t, _, e) => {
                    self.expr(t, parent);
                    self.expr(e, parent);
                }
                StmtKind::Expr(e) | StmtKind::Return(e) => self.expr(e, parent),
                StmtKind::If(c, t, f) => {
                    self.expr(c, parent);
                    self.block(t, parent);
                    self.block(f, parent);
                }
                StmtKind::While(c, body) => {
                    self.expr(c, parent);
                    self.block(body, parent);
                }
                StmtKind::For(_, it, body) => {
                    self.expr(it, parent);
                    self.block(body, parent);
                }
                StmtKind::Pass => {}
            }
        }
    }
}
