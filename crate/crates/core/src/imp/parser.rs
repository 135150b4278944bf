// SPDX-License-Identifier: Apache-2.0

use std::sync::Arc;

use super::ast::*;
use super::lexer::{tokenize, Kw, Tok, Token};
use super::SyntaxError;

/// Parses IMP source. The first function is the entry point.
pub fn parse_imp(source: &str) -> Result<Program, SyntaxError> {
    parse_imp_with(source, &[])
}

/// Like [`parse_imp`], but calls to the names in `extra` are also accepted.
pub fn parse_imp_with(source: &str, extra: &[&str]) -> Result<Program, SyntaxError> {
    let toks = tokenize(source, false)?;
    let mut p = Parser { toks, pos: 0 };
    let mut functions = Vec::new();
    while p.peek() != &Tok::Eof {
        functions.push(p.funcdef()?);
    }
    if functions.is_empty() {
        return Err(SyntaxError { line: 1, col: 1, message: "no function definition".into() });
    }
    for (i, f) in functions.iter().enumerate() {
        if functions[..i].iter().any(|g| g.name == f.name) {
            return Err(SyntaxError::at(f.span, format!("function '{}' defined twice", f.name)));
        }
    }
    let program = Program { functions, entry: 0, source: Arc::from(source) };
    check_calls(&program, extra)?;
    Ok(program)
}

/// Checks that every call names a builtin, a function of `program`, or one of `extra`.
pub fn check_calls(program: &Program, extra: &[&str]) -> Result<(), SyntaxError> {
    fn walk(e: &Expr, ok: &dyn Fn(&str) -> bool) -> Result<(), SyntaxError> {
        if let ExprKind::Call { func, method, .. } = &e.kind {
            if *method && func != "append" {
                return Err(SyntaxError::at(e.span, format!("unknown method '{func}'")));
            }
            if !ok(func) {
                return Err(SyntaxError::at(e.span, format!("unknown function '{func}'")));
            }
        }
        e.children().into_iter().try_for_each(|c| walk(c, ok))
    }
    fn block(b: &[Stmt], ok: &dyn Fn(&str) -> bool) -> Result<(), SyntaxError> {
        for s in b {
            match &s.kind {
                StmtKind::Assign(t, e) | StmtKind::AugAssign(t, _, e) => {
                    walk(t, ok)?;
                    walk(e, ok)?;
                }
                StmtKind::Expr(e) | StmtKind::Return(e) => walk(e, ok)?,
                StmtKind::If(c, t, f) => {
                    walk(c, ok)?;
                    block(t, ok)?;
                    block(f, ok)?;
                }
                StmtKind::While(c, b) | StmtKind::For(_, c, b) => {
                    walk(c, ok)?;
                    block(b, ok)?;
                }
                StmtKind::Pass | StmtKind::Choice(_) => {}
            }
        }
        Ok(())
    }
    let ok = |name: &str| BUILTINS.contains(&name) || program.function(name).is_some() || extra.contains(&name);
    program.functions.iter().try_for_each(|f| block(&f.body, &ok))
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, SyntaxError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(SyntaxError::at(self.span(), msg))
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Name(n) => format!("'{n}'"),
            Tok::Int(n) => format!("'{n}'"),
            Tok::Str(_) => "string".into(),
            Tok::Kw(k) => format!("{k:?}").to_lowercase(),
            Tok::Op(o) => format!("'{o}'"),
            Tok::Newline => "end of line".into(),
            Tok::Indent => "indent".into(),
            Tok::Dedent => "dedent".into(),
            Tok::Eof => "end of input".into(),
        }
    }

    fn at_op(&self, op: &str) -> bool {
        matches!(self.peek(), Tok::Op(o) if *o == op)
    }

    fn at_kw(&self, kw: Kw) -> bool {
        self.peek() == &Tok::Kw(kw)
    }

    fn eat_op(&mut self, op: &str) -> bool {
        if self.at_op(op) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_op(&mut self, op: &str) -> PResult<Span> {
        if self.at_op(op) {
            Ok(self.bump().span)
        } else {
            self.err(format!("expected '{op}', found {}", self.describe()))
        }
    }

    fn expect_kw(&mut self, kw: Kw) -> PResult<Span> {
        if self.at_kw(kw) {
            Ok(self.bump().span)
        } else {
            self.err(format!("expected {}, found {}", format!("{kw:?}").to_lowercase(), self.describe()))
        }
    }

    fn name(&mut self) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Name(n) => Ok((n, self.bump().span)),
            _ => self.err(format!("expected a name, found {}", self.describe())),
        }
    }

    fn newline(&mut self) -> PResult<()> {
        match self.peek() {
            Tok::Newline => {
                self.bump();
                Ok(())
            }
            Tok::Eof | Tok::Dedent => Ok(()),
            _ => self.err(format!("expected end of line, found {}", self.describe())),
        }
    }

    fn funcdef(&mut self) -> PResult<FuncDef> {
        if self.peek() == &Tok::Indent {
            return self.err("unexpected indentation");
        }
        let start = self.expect_kw(Kw::Def)?;
        let (name, _) = self.name()?;
        self.expect_op("(")?;
        let mut params = Vec::new();
        if !self.at_op(")") {
            loop {
                let (p, sp) = self.name()?;
                if params.contains(&p) {
                    return Err(SyntaxError::at(sp, format!("duplicate parameter '{p}'")));
                }
                params.push(p);
                if !self.eat_op(",") {
                    break;
                }
            }
        }
        self.expect_op(")")?;
        self.expect_op(":")?;
        let body = self.block()?;
        let span = start.to(body.last().map_or(start, |s| s.span));
        Ok(FuncDef { name, params, body, span })
    }

    fn block(&mut self) -> PResult<Vec<Stmt>> {
        if self.peek() != &Tok::Newline {
            let s = self.simple()?;
            self.newline()?;
            return Ok(vec![s]);
        }
        self.bump();
        if self.peek() != &Tok::Indent {
            return self.err("expected an indented block");
        }
        self.bump();
        let mut out = Vec::new();
        while !matches!(self.peek(), Tok::Dedent | Tok::Eof) {
            out.push(self.stmt()?);
        }
        if self.peek() == &Tok::Dedent {
            self.bump();
        }
        Ok(out)
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        match self.peek() {
            Tok::Kw(Kw::If) => self.if_stmt(),
            Tok::Kw(Kw::While) => {
                let start = self.bump().span;
                let cond = self.expr()?;
                self.expect_op(":")?;
                let body = self.block()?;
                let span = start.to(body.last().unwrap().span);
                Ok(Stmt::new(StmtKind::While(cond, body), span))
            }
            Tok::Kw(Kw::For) => {
                let start = self.bump().span;
                let (var, _) = self.name()?;
                self.expect_kw(Kw::In)?;
                let iter = self.expr()?;
                self.expect_op(":")?;
                let body = self.block()?;
                let span = start.to(body.last().unwrap().span);
                Ok(Stmt::new(StmtKind::For(var, iter, body), span))
            }
            Tok::Kw(Kw::Def) => self.err("nested function definitions are not supported"),
            Tok::Indent => self.err("unexpected indentation"),
            _ => {
                let s = self.simple()?;
                self.newline()?;
                Ok(s)
            }
        }
    }

    fn if_stmt(&mut self) -> PResult<Stmt> {
        let start = self.bump().span;
        let cond = self.expr()?;
        self.expect_op(":")?;
        let then = self.block()?;
        let mut end = then.last().unwrap().span;
        let els = if self.at_kw(Kw::Elif) {
            let nested = self.if_stmt()?;
            end = nested.span;
            vec![nested]
        } else if self.at_kw(Kw::Else) {
            self.bump();
            self.expect_op(":")?;
            let b = self.block()?;
            end = b.last().unwrap().span;
            b
        } else {
            Vec::new()
        };
        Ok(Stmt::new(StmtKind::If(cond, then, els), start.to(end)))
    }

    fn simple(&mut self) -> PResult<Stmt> {
        let start = self.span();
        if self.at_kw(Kw::Return) {
            self.bump();
            let e = self.expr()?;
            let span = start.to(e.span);
            return Ok(Stmt::new(StmtKind::Return(e), span));
        }
        if self.at_kw(Kw::Pass) {
            self.bump();
            return Ok(Stmt::new(StmtKind::Pass, start));
        }
        let lhs = self.expr()?;
        let aug = match self.peek() {
            Tok::Op("=") => None,
            Tok::Op("+=") => Some(ArithOp::Add),
            Tok::Op("-=") => Some(ArithOp::Sub),
            Tok::Op("*=") => Some(ArithOp::Mul),
            Tok::Op("/=") => Some(ArithOp::Div),
            Tok::Op("**=") => Some(ArithOp::Pow),
            _ => {
                if !matches!(lhs.kind, ExprKind::Call { .. }) {
                    return Err(SyntaxError::at(lhs.span, "expression statement must be a call"));
                }
                let span = lhs.span;
                return Ok(Stmt::new(StmtKind::Expr(lhs), span));
            }
        };
        if !matches!(lhs.kind, ExprKind::Var(_) | ExprKind::Index(..)) {
            return Err(SyntaxError::at(lhs.span, "cannot assign to this expression"));
        }
        self.bump();
        let rhs = self.expr()?;
        let span = start.to(rhs.span);
        Ok(Stmt::new(
            match aug {
                None => StmtKind::Assign(lhs, rhs),
                Some(op) => StmtKind::AugAssign(lhs, op, rhs),
            },
            span,
        ))
    }

    pub fn expr(&mut self) -> PResult<Expr> {
        let then = self.or_expr()?;
        if !self.at_kw(Kw::If) {
            return Ok(then);
        }
        self.bump();
        let cond = self.or_expr()?;
        self.expect_kw(Kw::Else)?;
        let els = self.expr()?;
        let span = then.span.to(els.span);
        Ok(Expr::new(ExprKind::CondExpr { then: Box::new(then), cond: Box::new(cond), els: Box::new(els) }, span))
    }

    fn or_expr(&mut self) -> PResult<Expr> {
        let mut l = self.and_expr()?;
        while self.at_kw(Kw::Or) {
            self.bump();
            let r = self.and_expr()?;
            let span = l.span.to(r.span);
            l = Expr::new(ExprKind::BoolOp(Box::new(l), BoolOp::Or, Box::new(r)), span);
        }
        Ok(l)
    }

    fn and_expr(&mut self) -> PResult<Expr> {
        let mut l = self.not_expr()?;
        while self.at_kw(Kw::And) {
            self.bump();
            let r = self.not_expr()?;
            let span = l.span.to(r.span);
            l = Expr::new(ExprKind::BoolOp(Box::new(l), BoolOp::And, Box::new(r)), span);
        }
        Ok(l)
    }

    fn not_expr(&mut self) -> PResult<Expr> {
        if self.at_kw(Kw::Not) {
            let start = self.bump().span;
            let e = self.not_expr()?;
            let span = start.to(e.span);
            return Ok(Expr::new(ExprKind::Not(Box::new(e)), span));
        }
        self.comparison()
    }

    fn cmp_op(&self) -> Option<CmpOp> {
        Some(match self.peek() {
            Tok::Op("<") => CmpOp::Lt,
            Tok::Op(">") => CmpOp::Gt,
            Tok::Op("<=") => CmpOp::Le,
            Tok::Op(">=") => CmpOp::Ge,
            Tok::Op("==") => CmpOp::Eq,
            Tok::Op("!=") => CmpOp::Ne,
            _ => return None,
        })
    }

    fn comparison(&mut self) -> PResult<Expr> {
        let l = self.arith()?;
        let Some(op) = self.cmp_op() else { return Ok(l) };
        self.bump();
        let r = self.arith()?;
        if self.cmp_op().is_some() {
            return self.err("chained comparisons are not supported");
        }
        let span = l.span.to(r.span);
        Ok(Expr::new(ExprKind::Compare(Box::new(l), op, Box::new(r)), span))
    }

    fn arith(&mut self) -> PResult<Expr> {
        let mut l = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Op("+") => ArithOp::Add,
                Tok::Op("-") => ArithOp::Sub,
                _ => return Ok(l),
            };
            self.bump();
            let r = self.term()?;
            let span = l.span.to(r.span);
            l = Expr::new(ExprKind::BinOp(Box::new(l), op, Box::new(r)), span);
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut l = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Op("*") => ArithOp::Mul,
                Tok::Op("/") => ArithOp::Div,
                _ => return Ok(l),
            };
            self.bump();
            let r = self.factor()?;
            let span = l.span.to(r.span);
            l = Expr::new(ExprKind::BinOp(Box::new(l), op, Box::new(r)), span);
        }
    }

    fn factor(&mut self) -> PResult<Expr> {
        if !self.at_op("-") {
            return self.power();
        }
        let start = self.bump().span;
        if let (Tok::Int(n), false) = (self.peek().clone(), self.peek_at(1) == &Tok::Op("**")) {
            let end = self.bump().span;
            return Ok(Expr::new(ExprKind::Int(-n), start.to(end)));
        }
        let e = self.factor()?;
        let span = start.to(e.span);
        let zero = Expr::new(ExprKind::Int(0), start);
        Ok(Expr::new(ExprKind::BinOp(Box::new(zero), ArithOp::Sub, Box::new(e)), span))
    }

    fn power(&mut self) -> PResult<Expr> {
        let base = self.postfix()?;
        if !self.at_op("**") {
            return Ok(base);
        }
        self.bump();
        let exp = self.factor()?;
        let span = base.span.to(exp.span);
        Ok(Expr::new(ExprKind::BinOp(Box::new(base), ArithOp::Pow, Box::new(exp)), span))
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.atom()?;
        loop {
            if self.at_op("[") {
                self.bump();
                let lo = if self.at_op(":") { None } else { Some(Box::new(self.expr()?)) };
                if self.eat_op(":") {
                    let hi = if self.at_op("]") { None } else { Some(Box::new(self.expr()?)) };
                    let end = self.expect_op("]")?;
                    let span = e.span.to(end);
                    e = Expr::new(ExprKind::Slice(Box::new(e), lo, hi), span);
                } else {
                    let end = self.expect_op("]")?;
                    let span = e.span.to(end);
                    e = Expr::new(ExprKind::Index(Box::new(e), lo.unwrap()), span);
                }
            } else if self.at_op(".") {
                self.bump();
                let (func, _) = self.name()?;
                self.expect_op("(")?;
                let mut args = vec![e];
                args.extend(self.args()?);
                let end = self.expect_op(")")?;
                let span = args[0].span.to(end);
                e = Expr::new(ExprKind::Call { func, args, method: true }, span);
            } else {
                return Ok(e);
            }
        }
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        let mut args = Vec::new();
        if self.at_op(")") {
            return Ok(args);
        }
        loop {
            args.push(self.expr()?);
            if !self.eat_op(",") || self.at_op(")") {
                return Ok(args);
            }
        }
    }

    fn atom(&mut self) -> PResult<Expr> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::new(ExprKind::Int(n), start))
            }
            Tok::Kw(Kw::True) => {
                self.bump();
                Ok(Expr::new(ExprKind::Bool(true), start))
            }
            Tok::Kw(Kw::False) => {
                self.bump();
                Ok(Expr::new(ExprKind::Bool(false), start))
            }
            Tok::Name(n) => {
                self.bump();
                if self.at_op("(") {
                    self.bump();
                    let args = self.args()?;
                    let end = self.expect_op(")")?;
                    return Ok(Expr::new(ExprKind::Call { func: n, args, method: false }, start.to(end)));
                }
                Ok(Expr::new(ExprKind::Var(n), start))
            }
            Tok::Op("(") => {
                self.bump();
                if self.at_op(")") {
                    let end = self.bump().span;
                    return Ok(Expr::new(ExprKind::Tuple(Vec::new()), start.to(end)));
                }
                let first = self.expr()?;
                if self.at_op(",") {
                    let mut items = vec![first];
                    while self.eat_op(",") && !self.at_op(")") {
                        items.push(self.expr()?);
                    }
                    let end = self.expect_op(")")?;
                    return Ok(Expr::new(ExprKind::Tuple(items), start.to(end)));
                }
                let end = self.expect_op(")")?;
                Ok(Expr { kind: first.kind, span: start.to(end) })
            }
            Tok::Op("[") => {
                self.bump();
                let mut items = Vec::new();
                while !self.at_op("]") {
                    items.push(self.expr()?);
                    if !self.eat_op(",") {
                        break;
                    }
                }
                let end = self.expect_op("]")?;
                Ok(Expr::new(ExprKind::List(items), start.to(end)))
            }
            _ => self.err(format!("expected an expression, found {}", self.describe())),
        }
    }
}

impl SyntaxError {
    pub fn at(span: Span, message: impl Into<String>) -> SyntaxError {
        SyntaxError { line: span.line, col: span.col, message: message.into() }
    }
}
