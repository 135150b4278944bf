// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use super::syntax::*;
use crate::imp::ast::*;

/// What a metavariable stands for after a successful match.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Binding {
    Expr(Expr),
    Stmt(Stmt),
    /// The whole body of a function matched by a function pattern.
    Block(Vec<Stmt>),
    /// A function or parameter name in a function pattern.
    Name(String),
    Cmp(CmpOp),
    Arith(ArithOp),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution(pub BTreeMap<String, Binding>);

impl Substitution {
    pub fn get(&self, name: &str) -> Option<&Binding> {
        self.0.get(name)
    }

    /// Binds `name`, or checks that an existing binding is structurally equal.
    fn bind(&mut self, name: &str, b: Binding) -> bool {
        match self.0.get(name) {
            Some(old) => *old == b,
            None => {
                self.0.insert(name.to_string(), b);
                true
            }
        }
    }
}

/// A program node a pattern can be matched against.
#[derive(Clone, Copy, Debug)]
pub enum Node<'a> {
    Expr(&'a Expr),
    Stmt(&'a Stmt),
    Func(&'a FuncDef),
}

pub fn match_pattern(lhs: &Pattern, node: Node<'_>) -> Option<Substitution> {
    let mut sub = Substitution::default();
    let ok = match (lhs, node) {
        (Pattern::Expr(p), Node::Expr(e)) => match_expr(p, e, &mut sub),
        (Pattern::Stmt(p), Node::Stmt(s)) => match_stmt(p, s, &mut sub),
        (Pattern::Func { name, params, body }, Node::Func(f)) => {
            params.len() == f.params.len()
                && match_name(name, &f.name, &mut sub)
                && params.iter().zip(&f.params).all(|(p, n)| match_name(p, n, &mut sub))
                && sub.bind(body, Binding::Block(f.body.clone()))
        }
        _ => false,
    };
    ok.then_some(sub)
}

fn match_name(p: &NamePat, name: &str, sub: &mut Substitution) -> bool {
    match p {
        NamePat::Lit(n) => n == name,
        NamePat::Meta(m) => sub.bind(m, Binding::Name(name.to_string())),
    }
}

fn is_boolish(e: &Expr) -> bool {
    matches!(e.kind, ExprKind::Compare(..) | ExprKind::BoolOp(..) | ExprKind::Not(_) | ExprKind::Bool(_))
}

fn match_op<T: Copy + PartialEq>(p: &OpRef<T>, op: T, wrap: fn(T) -> Binding, sub: &mut Substitution) -> bool {
    match p {
        OpRef::Lit(o) => *o == op,
        OpRef::Meta(m) => sub.bind(m, wrap(op)),
        OpRef::Any(_) => false,
    }
}

fn match_all(ps: &[TExpr], es: &[Expr], sub: &mut Substitution) -> bool {
    ps.len() == es.len() && ps.iter().zip(es).all(|(p, e)| match_expr(p, e, sub))
}

fn match_opt(p: &Option<Box<TExpr>>, e: &Option<Box<Expr>>, sub: &mut Substitution) -> bool {
    match (p, e) {
        (None, None) => true,
        (Some(p), Some(e)) => match_expr(p, e, sub),
        _ => false,
    }
}

pub fn match_expr(p: &TExpr, e: &Expr, sub: &mut Substitution) -> bool {
    use ExprKind as K;
    if matches!(e.kind, K::Choice(_)) {
        return false;
    }
    match (p, &e.kind) {
        (TExpr::Meta { name, .. }, _) => {
            let fits = match meta_kind(name) {
                Some(MetaKind::Arith) => true,
                Some(MetaKind::Bool) => is_boolish(e),
                Some(MetaKind::Var) => matches!(e.kind, K::Var(_)),
                Some(MetaKind::IntLit) => matches!(e.kind, K::Int(_)),
                _ => false,
            };
            fits && sub.bind(name, Binding::Expr(e.clone()))
        }
        (TExpr::Int(a), K::Int(b)) => a == b,
        (TExpr::Bool(a), K::Bool(b)) => a == b,
        (TExpr::Var(a), K::Var(b)) => a == b,
        (TExpr::List(ps), K::List(es)) | (TExpr::Tuple(ps), K::Tuple(es)) => match_all(ps, es, sub),
        (TExpr::Index(pb, pi), K::Index(b, i)) => match_expr(pb, b, sub) && match_expr(pi, i, sub),
        (TExpr::Slice(pb, plo, phi), K::Slice(b, lo, hi)) => {
            match_expr(pb, b, sub) && match_opt(plo, lo, sub) && match_opt(phi, hi, sub)
        }
        (TExpr::BinOp(pl, pop, pr), K::BinOp(l, op, r)) => {
            match_op(pop, *op, Binding::Arith, sub) && match_expr(pl, l, sub) && match_expr(pr, r, sub)
        }
        (TExpr::Compare(pl, pop, pr), K::Compare(l, op, r)) => {
            match_expr(pl, l, sub) && match_op(pop, *op, Binding::Cmp, sub) && match_expr(pr, r, sub)
        }
        (TExpr::BoolOp(pl, pop, pr), K::BoolOp(l, op, r)) => pop == op && match_expr(pl, l, sub) && match_expr(pr, r, sub),
        (TExpr::Not(pa), K::Not(a)) => match_expr(pa, a, sub),
        (TExpr::Call { func: pf, args: pa, method: pm }, K::Call { func, args, method }) => {
            pf == func && pm == method && match_all(pa, args, sub)
        }
        (TExpr::CondExpr { then: pt, cond: pc, els: pe }, K::CondExpr { then, cond, els }) => {
            match_expr(pt, then, sub) && match_expr(pc, cond, sub) && match_expr(pe, els, sub)
        }
        _ => false,
    }
}

fn match_block(ps: &[TStmt], ss: &[Stmt], sub: &mut Substitution) -> bool {
    ps.len() == ss.len() && ps.iter().zip(ss).all(|(p, s)| match_stmt(p, s, sub))
}

pub fn match_stmt(p: &TStmt, s: &Stmt, sub: &mut Substitution) -> bool {
    use StmtKind as K;
    match (p, &s.kind) {
        (_, K::Choice(_)) => false,
        (TStmt::Meta { name, .. }, _) => sub.bind(name, Binding::Stmt(s.clone())),
        (TStmt::Assign(pt, pe), K::Assign(t, e)) => match_expr(pt, t, sub) && match_expr(pe, e, sub),
        (TStmt::AugAssign(pt, pop, pe), K::AugAssign(t, op, e)) => {
            match_expr(pt, t, sub) && match_op(pop, *op, Binding::Arith, sub) && match_expr(pe, e, sub)
        }
        (TStmt::Expr(pe), K::Expr(e)) | (TStmt::Return(pe), K::Return(e)) => match_expr(pe, e, sub),
        (TStmt::Pass, K::Pass) => true,
        (TStmt::If(pc, pt, pf), K::If(c, t, f)) => match_expr(pc, c, sub) && match_block(pt, t, sub) && match_block(pf, f, sub),
        _ => false,
    }
}

/// Applies `sub` to an expression pattern. `None` if some metavariable is
/// unbound or bound to something that is not an expression.
pub fn apply_expr(p: &TExpr, sub: &Substitution) -> Option<Expr> {
    let mk = |kind| Some(Expr::new(kind, Span::default()));
    let bx = |t: &TExpr| apply_expr(t, sub).map(Box::new);
    let all = |ts: &[TExpr]| ts.iter().map(|t| apply_expr(t, sub)).collect::<Option<Vec<_>>>();
    let opt = |t: &Option<Box<TExpr>>| match t {
        None => Some(None),
        Some(t) => bx(t).map(Some),
    };
    match p {
        TExpr::Meta { name, .. } => match sub.get(name)? {
            Binding::Expr(e) => Some(e.clone()),
            Binding::Name(n) => mk(ExprKind::Var(n.clone())),
            _ => None,
        },
        TExpr::Int(n) => mk(ExprKind::Int(*n)),
        TExpr::Bool(b) => mk(ExprKind::Bool(*b)),
        TExpr::Var(v) => mk(ExprKind::Var(v.clone())),
        TExpr::List(ts) => mk(ExprKind::List(all(ts)?)),
        TExpr::Tuple(ts) => mk(ExprKind::Tuple(all(ts)?)),
        TExpr::Index(b, i) => mk(ExprKind::Index(bx(b)?, bx(i)?)),
        TExpr::Slice(b, lo, hi) => mk(ExprKind::Slice(bx(b)?, opt(lo)?, opt(hi)?)),
        TExpr::BinOp(l, op, r) => mk(ExprKind::BinOp(bx(l)?, resolve_arith(op, sub)?, bx(r)?)),
        TExpr::Compare(l, op, r) => mk(ExprKind::Compare(bx(l)?, resolve_cmp(op, sub)?, bx(r)?)),
        TExpr::BoolOp(l, op, r) => mk(ExprKind::BoolOp(bx(l)?, *op, bx(r)?)),
        TExpr::Not(a) => mk(ExprKind::Not(bx(a)?)),
        TExpr::Call { func, args, method } => mk(ExprKind::Call { func: func.clone(), args: all(args)?, method: *method }),
        TExpr::CondExpr { then, cond, els } => mk(ExprKind::CondExpr { then: bx(then)?, cond: bx(cond)?, els: bx(els)? }),
        TExpr::Primed(_) | TExpr::Set(_) | TExpr::DefaultSet(..) | TExpr::Scope(_) => None,
    }
}

pub fn apply_stmt(p: &TStmt, sub: &Substitution) -> Option<Stmt> {
    let mk = |kind| Some(Stmt::new(kind, Span::default()));
    let block = |ts: &[TStmt]| ts.iter().map(|t| apply_stmt(t, sub)).collect::<Option<Vec<_>>>();
    match p {
        TStmt::Meta { name, .. } => match sub.get(name)? {
            Binding::Stmt(s) => Some(s.clone()),
            _ => None,
        },
        TStmt::Assign(t, e) => mk(StmtKind::Assign(apply_expr(t, sub)?, apply_expr(e, sub)?)),
        TStmt::AugAssign(t, op, e) => mk(StmtKind::AugAssign(apply_expr(t, sub)?, resolve_arith(op, sub)?, apply_expr(e, sub)?)),
        TStmt::Expr(e) => mk(StmtKind::Expr(apply_expr(e, sub)?)),
        TStmt::Return(e) => mk(StmtKind::Return(apply_expr(e, sub)?)),
        TStmt::Pass => mk(StmtKind::Pass),
        TStmt::If(c, t, f) => mk(StmtKind::If(apply_expr(c, sub)?, block(t)?, block(f)?)),
        TStmt::Set(_) => None,
    }
}

pub(crate) fn resolve_arith(op: &OpRef<ArithOp>, sub: &Substitution) -> Option<ArithOp> {
    match op {
        OpRef::Lit(o) => Some(*o),
        OpRef::Meta(m) | OpRef::Any(Some(m)) => match sub.get(m)? {
            Binding::Arith(o) => Some(*o),
            _ => None,
        },
        OpRef::Any(None) => None,
    }
}

pub(crate) fn resolve_cmp(op: &OpRef<CmpOp>, sub: &Substitution) -> Option<CmpOp> {
    match op {
        OpRef::Lit(o) => Some(*o),
        OpRef::Meta(m) | OpRef::Any(Some(m)) => match sub.get(m)? {
            Binding::Cmp(o) => Some(*o),
            _ => None,
        },
        OpRef::Any(None) => None,
    }
}
