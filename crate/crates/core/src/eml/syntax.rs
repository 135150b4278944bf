// SPDX-License-Identifier: Apache-2.0

use crate::imp::ast::{ArithOp, BoolOp, CmpOp};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MetaKind {
    /// `a`: any expression.
    Arith,
    /// `b`: a comparison, boolean connective, `not` or boolean literal.
    Bool,
    /// `s`: a statement, or a whole body in a function pattern.
    Stmt,
    /// `v`: a variable, or a name in a function header.
    Var,
    /// `n`: an integer literal.
    IntLit,
    /// `cop`: a comparison operator.
    CmpOp,
    /// `aop`: an arithmetic operator.
    ArithOp,
}

/// The kind of a metavariable name, decided by its stem: `a`, `a0`, `cop2`, ...
pub fn meta_kind(name: &str) -> Option<MetaKind> {
    let stem = name.trim_end_matches(|c: char| c.is_ascii_digit());
    Some(match stem {
        "a" => MetaKind::Arith,
        "b" => MetaKind::Bool,
        "s" => MetaKind::Stmt,
        "v" => MetaKind::Var,
        "n" => MetaKind::IntLit,
        "cop" => MetaKind::CmpOp,
        "aop" => MetaKind::ArithOp,
        _ => return None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OpRef<T> {
    Lit(T),
    Meta(String),
    /// `~cop` in a template: every operator of the class, the bound one as default.
    Any(Option<String>),
}

/// Expression patterns and templates share one tree; the template-only
/// forms are rejected on the left-hand side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TExpr {
    Meta {
        name: String,
        primed: bool,
    },
    Int(i64),
    Bool(bool),
    Var(String),
    List(Vec<TExpr>),
    Tuple(Vec<TExpr>),
    Index(Box<TExpr>, Box<TExpr>),
    Slice(Box<TExpr>, Option<Box<TExpr>>, Option<Box<TExpr>>),
    BinOp(Box<TExpr>, OpRef<ArithOp>, Box<TExpr>),
    Compare(Box<TExpr>, OpRef<CmpOp>, Box<TExpr>),
    BoolOp(Box<TExpr>, BoolOp, Box<TExpr>),
    Not(Box<TExpr>),
    Call {
        func: String,
        args: Vec<TExpr>,
        method: bool,
    },
    CondExpr {
        then: Box<TExpr>,
        cond: Box<TExpr>,
        els: Box<TExpr>,
    },
    /// `(t)'`: instantiate, then rewrite the result.
    Primed(Box<TExpr>),
    /// `{e1, e2}`: each member is a separate alternative.
    Set(Vec<TExpr>),
    /// `{d | e1, e2}`: a nested choice, `d` at no extra cost.
    DefaultSet(Box<TExpr>, Vec<TExpr>),
    /// `?x`: `x` or any other variable in scope.
    Scope(String),
}

impl TExpr {
    pub fn children(&self) -> Vec<&TExpr> {
        use TExpr::*;
        match self {
            Meta { .. } | Int(_) | Bool(_) | Var(_) | Scope(_) => vec![],
            List(es) | Tuple(es) | Set(es) => es.iter().collect(),
            Call { args, .. } => args.iter().collect(),
            Index(a, b) | BinOp(a, _, b) | Compare(a, _, b) | BoolOp(a, _, b) => vec![a, b],
            Slice(a, lo, hi) => {
                let mut v = vec![&**a];
                v.extend(lo.as_deref());
                v.extend(hi.as_deref());
                v
            }
            Not(a) | Primed(a) => vec![a],
            CondExpr { then, cond, els } => vec![then, cond, els],
            DefaultSet(d, es) => std::iter::once(&**d).chain(es).collect(),
        }
    }

    /// Syntax-tree size; a choice counts as its largest member.
    pub fn size(&self) -> usize {
        match self {
            TExpr::Set(es) => es.iter().map(TExpr::size).max().unwrap_or(0),
            TExpr::DefaultSet(d, es) => es.iter().map(TExpr::size).chain([d.size()]).max().unwrap_or(0),
            TExpr::Primed(a) => a.size(),
            _ => 1 + self.children().iter().map(|c| c.size()).sum::<usize>(),
        }
    }

    /// Metavariables mentioned anywhere below, including operator metavariables.
    pub fn metas(&self, out: &mut Vec<String>) {
        match self {
            TExpr::Meta { name, .. } => out.push(name.clone()),
            TExpr::Scope(x) if meta_kind(x).is_some() => out.push(x.clone()),
            TExpr::BinOp(_, OpRef::Meta(m) | OpRef::Any(Some(m)), _) => out.push(m.clone()),
            TExpr::Compare(_, OpRef::Meta(m) | OpRef::Any(Some(m)), _) => out.push(m.clone()),
            _ => {}
        }
        for c in self.children() {
            c.metas(out);
        }
    }

    /// Whether the term uses a template-only form anywhere.
    pub fn has_template_forms(&self) -> bool {
        let here = match self {
            TExpr::Meta { primed, .. } => *primed,
            TExpr::Primed(_) | TExpr::Set(_) | TExpr::DefaultSet(..) | TExpr::Scope(_) => true,
            TExpr::BinOp(_, OpRef::Any(_), _) | TExpr::Compare(_, OpRef::Any(_), _) => true,
            _ => false,
        };
        here || self.children().iter().any(|c| c.has_template_forms())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TStmt {
    Meta {
        name: String,
        primed: bool,
    },
    Assign(TExpr, TExpr),
    AugAssign(TExpr, OpRef<ArithOp>, TExpr),
    Expr(TExpr),
    Return(TExpr),
    Pass,
    If(TExpr, Vec<TStmt>, Vec<TStmt>),
    /// `{seq1, seq2}` in statement position.
    Set(Vec<Vec<TStmt>>),
}

impl TStmt {
    pub fn exprs(&self) -> Vec<&TExpr> {
        match self {
            TStmt::Assign(t, e) | TStmt::AugAssign(t, _, e) => vec![t, e],
            TStmt::Expr(e) | TStmt::Return(e) | TStmt::If(e, ..) => vec![e],
            TStmt::Meta { .. } | TStmt::Pass | TStmt::Set(_) => vec![],
        }
    }

    pub fn blocks(&self) -> Vec<&[TStmt]> {
        match self {
            TStmt::If(_, t, f) => vec![t, f],
            TStmt::Set(seqs) => seqs.iter().map(Vec::as_slice).collect(),
            _ => vec![],
        }
    }

    pub fn size(&self) -> usize {
        match self {
            TStmt::Set(seqs) => seqs.iter().map(|s| seq_size(s)).max().unwrap_or(0),
            _ => {
                1 + self.exprs().iter().map(|e| e.size()).sum::<usize>()
                    + self.blocks().iter().map(|b| seq_size(b)).sum::<usize>()
            }
        }
    }

    pub fn metas(&self, out: &mut Vec<String>) {
        match self {
            TStmt::Meta { name, .. } => out.push(name.clone()),
            TStmt::AugAssign(_, OpRef::Meta(m) | OpRef::Any(Some(m)), _) => out.push(m.clone()),
            _ => {}
        }
        self.exprs().iter().for_each(|e| e.metas(out));
        self.blocks().iter().for_each(|b| b.iter().for_each(|s| s.metas(out)));
    }

    pub fn has_template_forms(&self) -> bool {
        match self {
            TStmt::Meta { primed, .. } => *primed,
            TStmt::Set(_) => true,
            TStmt::AugAssign(_, OpRef::Any(_), _) => true,
            _ => {
                self.exprs().iter().any(|e| e.has_template_forms())
                    || self.blocks().iter().any(|b| b.iter().any(TStmt::has_template_forms))
            }
        }
    }
}

pub fn seq_size(seq: &[TStmt]) -> usize {
    seq.iter().map(TStmt::size).sum()
}

/// A name in a function-pattern header: a metavariable or a literal name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NamePat {
    Meta(String),
    Lit(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pattern {
    Expr(TExpr),
    Stmt(TStmt),
    /// `def name(params): s`, where `s` binds the whole body.
    Func {
        name: NamePat,
        params: Vec<NamePat>,
        body: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Template {
    Expr(TExpr),
    Stmts(Vec<TStmt>),
    /// The replacement body of a function pattern.
    Func(Vec<TStmt>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrectionRule {
    pub id: String,
    pub lhs: Pattern,
    pub rhs: Template,
    pub weight: u32,
    pub message: Option<String>,
}

impl Pattern {
    pub fn size(&self) -> usize {
        match self {
            Pattern::Expr(e) => e.size(),
            Pattern::Stmt(s) => s.size(),
            Pattern::Func { params, .. } => 2 + params.len(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ErrorModel {
    pub rules: Vec<CorrectionRule>,
}

impl ErrorModel {
    pub fn rule(&self, id: &str) -> Option<&CorrectionRule> {
        self.rules.iter().find(|r| r.id == id)
    }
}
