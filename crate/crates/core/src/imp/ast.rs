// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

/// Location of a node in its source text.
///
/// Spans never take part in `==` or hashing: two trees are equal when they
/// have the same shape, wherever they came from. Use [`Span::same`] when the
/// exact location matters.
#[derive(Clone, Copy, Debug, Default)]
pub struct Span {
    /// Byte offset of the first character.
    pub start: u32,
    /// Byte offset one past the last character.
    pub end: u32,
    /// 1-based line.
    pub line: u32,
    /// 1-based column, counted in characters.
    pub col: u32,
}

impl Span {
    pub fn new(start: usize, end: usize, line: u32, col: u32) -> Span {
        Span { start: start as u32, end: end as u32, line, col }
    }

    pub fn to(self, other: Span) -> Span {
        Span { start: self.start, end: other.end.max(self.end), line: self.line, col: self.col }
    }

    pub fn same(&self, other: &Span) -> bool {
        (self.start, self.end, self.line, self.col) == (other.start, other.end, other.line, other.col)
    }
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl Eq for Span {}

impl Hash for Span {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

pub type SiteId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl ArithOp {
    pub const ALL: [ArithOp; 5] = [ArithOp::Add, ArithOp::Sub, ArithOp::Mul, ArithOp::Div, ArithOp::Pow];

    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
            ArithOp::Pow => "**",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    pub const ALL: [CmpOp; 6] = [CmpOp::Lt, CmpOp::Gt, CmpOp::Le, CmpOp::Ge, CmpOp::Eq, CmpOp::Ne];

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Gt => ">",
            CmpOp::Le => "<=",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoolOp {
    And,
    Or,
}

impl BoolOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BoolOp::And => "and",
            BoolOp::Or => "or",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExprKind {
    Int(i64),
    Bool(bool),
    List(Vec<Expr>),
    Tuple(Vec<Expr>),
    Var(String),
    Index(Box<Expr>, Box<Expr>),
    Slice(Box<Expr>, Option<Box<Expr>>, Option<Box<Expr>>),
    BinOp(Box<Expr>, ArithOp, Box<Expr>),
    Compare(Box<Expr>, CmpOp, Box<Expr>),
    BoolOp(Box<Expr>, BoolOp, Box<Expr>),
    Not(Box<Expr>),
    /// `f(x, y)`, or `x.f(y)` when `method` is set; the receiver is then `args[0]`.
    Call {
        func: String,
        args: Vec<Expr>,
        method: bool,
    },
    CondExpr {
        then: Box<Expr>,
        cond: Box<Expr>,
        els: Box<Expr>,
    },
    /// Only present in rewritten programs.
    Choice(SiteId),
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Expr {
        Expr { kind, span }
    }

    /// Direct subexpressions, left to right.
    pub fn children(&self) -> Vec<&Expr> {
        use ExprKind::*;
        match &self.kind {
            Int(_) | Bool(_) | Var(_) | Choice(_) => vec![],
            List(es) | Tuple(es) => es.iter().collect(),
            Call { args, .. } => args.iter().collect(),
            Index(a, b) | BinOp(a, _, b) | Compare(a, _, b) | BoolOp(a, _, b) => vec![a, b],
            Slice(a, lo, hi) => {
                let mut v = vec![&**a];
                v.extend(lo.as_deref());
                v.extend(hi.as_deref());
                v
            }
            Not(a) => vec![a],
            CondExpr { then, cond, els } => vec![then, cond, els],
        }
    }

    pub fn children_mut(&mut self) -> Vec<&mut Expr> {
        use ExprKind::*;
        match &mut self.kind {
            Int(_) | Bool(_) | Var(_) | Choice(_) => vec![],
            List(es) | Tuple(es) => es.iter_mut().collect(),
            Call { args, .. } => args.iter_mut().collect(),
            Index(a, b) | BinOp(a, _, b) | Compare(a, _, b) | BoolOp(a, _, b) => vec![a, b],
            Slice(a, lo, hi) => {
                let mut v = vec![&mut **a];
                v.extend(lo.as_deref_mut());
                v.extend(hi.as_deref_mut());
                v
            }
            Not(a) => vec![a],
            CondExpr { then, cond, els } => vec![then, cond, els],
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn is_var(&self) -> Option<&str> {
        match &self.kind {
            ExprKind::Var(v) => Some(v),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum StmtKind {
    /// The target is a `Var` or an `Index`.
    Assign(Expr, Expr),
    AugAssign(Expr, ArithOp, Expr),
    Expr(Expr),
    /// An empty else block means there was no `else`.
    If(Expr, Vec<Stmt>, Vec<Stmt>),
    While(Expr, Vec<Stmt>),
    For(String, Expr, Vec<Stmt>),
    Return(Expr),
    Pass,
    /// Only present in rewritten programs; stands for a block.
    Choice(SiteId),
}

impl Stmt {
    pub fn new(kind: StmtKind, span: Span) -> Stmt {
        Stmt { kind, span }
    }

    pub fn size(&self) -> usize {
        use StmtKind::*;
        let block = |b: &[Stmt]| b.iter().map(Stmt::size).sum::<usize>();
        1 + match &self.kind {
            Assign(t, e) | AugAssign(t, _, e) => t.size() + e.size(),
            Expr(e) | Return(e) => e.size(),
            If(c, t, e) => c.size() + block(t) + block(e),
            While(c, b) => c.size() + block(b),
            For(_, it, b) => 1 + it.size() + block(b),
            Pass | Choice(_) => 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FuncDef {
    pub name: String,
    pub params: Vec<String>,
    pub body: Vec<Stmt>,
    pub span: Span,
}

impl FuncDef {
    pub fn size(&self) -> usize {
        1 + self.params.len() + self.body.iter().map(Stmt::size).sum::<usize>()
    }
}

#[derive(Clone, Debug)]
pub struct Program {
    pub functions: Vec<FuncDef>,
    /// Index into `functions`.
    pub entry: usize,
    pub source: Arc<str>,
}

impl PartialEq for Program {
    fn eq(&self, other: &Program) -> bool {
        self.functions == other.functions && self.entry == other.entry
    }
}

impl Eq for Program {}

impl Hash for Program {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.functions.hash(state);
        self.entry.hash(state);
    }
}

impl Program {
    pub fn entry_fn(&self) -> &FuncDef {
        &self.functions[self.entry]
    }

    pub fn function(&self, name: &str) -> Option<&FuncDef> {
        self.functions.iter().find(|f| f.name == name)
    }

    /// Source text covered by `span`.
    pub fn text(&self, span: Span) -> &str {
        self.source.get(span.start as usize..span.end as usize).unwrap_or("")
    }

    pub fn size(&self) -> usize {
        self.functions.iter().map(FuncDef::size).sum()
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::imp::printer::print_program(self))
    }
}

pub const BUILTINS: [&str; 3] = ["len", "range", "append"];
