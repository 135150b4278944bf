// SPDX-License-Identifier: Apache-2.0

use std::collections::HashSet;

use super::syntax::*;
use super::EmlError;
use crate::imp::ast::{ArithOp, BoolOp, CmpOp, Span};
use crate::imp::lexer::{tokenize, Kw, Tok, Token};
use crate::imp::SyntaxError;

/// Parses an error model: one `rule` per line, `#` comments.
///
/// ```text
/// rule IndF: v[a] -> v[{a+1, a-1, ?a}] msg "In line {line}, change {sub} to {new}."
/// ```
pub fn parse_eml(source: &str) -> Result<ErrorModel, EmlError> {
    let toks = tokenize(source, true)?;
    let mut p = P { toks, pos: 0 };
    let mut rules: Vec<CorrectionRule> = Vec::new();
    let mut seen = HashSet::new();
    while p.peek() != &Tok::Eof {
        if p.peek() == &Tok::Newline {
            p.bump();
            continue;
        }
        let rule = p.rule()?;
        if !seen.insert(rule.id.clone()) {
            return Err(EmlError::DuplicateRuleId(rule.id));
        }
        rules.push(rule);
    }
    Ok(ErrorModel { rules })
}

struct P {
    toks: Vec<Token>,
    pos: usize,
}

type R<T> = Result<T, SyntaxError>;

impl P {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].tok
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

    fn err<T>(&self, msg: impl Into<String>) -> R<T> {
        Err(SyntaxError::at(self.span(), msg))
    }

    fn at_op(&self, op: &str) -> bool {
        matches!(self.peek(), Tok::Op(o) if *o == op)
    }

    fn at_name(&self, n: &str) -> bool {
        matches!(self.peek(), Tok::Name(x) if x == n)
    }

    fn eat_op(&mut self, op: &str) -> bool {
        let at = self.at_op(op);
        if at {
            self.bump();
        }
        at
    }

    fn expect_op(&mut self, op: &str) -> R<()> {
        if self.eat_op(op) {
            Ok(())
        } else {
            self.err(format!("expected '{op}'"))
        }
    }

    fn name(&mut self) -> R<String> {
        match self.peek().clone() {
            Tok::Name(n) => {
                self.bump();
                Ok(n)
            }
            _ => self.err("expected a name"),
        }
    }

    fn rule(&mut self) -> R<CorrectionRule> {
        let start = self.span();
        if !self.at_name("rule") {
            return self.err("expected 'rule'");
        }
        self.bump();
        let id = self.name()?;
        let mut weight = 1;
        if self.at_name("weight") {
            self.bump();
            match self.peek().clone() {
                Tok::Int(k) if k >= 1 && k <= u16::MAX as i64 => {
                    self.bump();
                    weight = k as u32;
                }
                _ => return self.err("weight must be a positive integer"),
            }
        }
        self.expect_op(":")?;
        let lhs = self.pattern()?;
        self.expect_op("->")?;
        let rhs = match &lhs {
            Pattern::Expr(_) => Template::Expr(self.texpr()?),
            Pattern::Stmt(_) => Template::Stmts(self.tseq()?),
            Pattern::Func { .. } => {
                if self.peek() == &Tok::Kw(Kw::Def) {
                    self.bump();
                    self.name()?;
                    self.expect_op("(")?;
                    while !self.at_op(")") {
                        self.name()?;
                        if !self.eat_op(",") {
                            break;
                        }
                    }
                    self.expect_op(")")?;
                    self.expect_op(":")?;
                }
                Template::Func(self.tseq()?)
            }
        };
        let mut message = None;
        if self.at_name("msg") {
            self.bump();
            match self.peek().clone() {
                Tok::Str(s) => {
                    self.bump();
                    message = Some(s);
                }
                _ => return self.err("expected a string after 'msg'"),
            }
        }
        match self.peek() {
            Tok::Newline => {
                self.bump();
            }
            Tok::Eof => {}
            _ => return self.err("expected end of rule"),
        }
        let rule = CorrectionRule { id, lhs, rhs, weight, message };
        check_rule(&rule, start)?;
        Ok(rule)
    }

    fn name_pat(&mut self) -> R<NamePat> {
        let n = self.name()?;
        Ok(match meta_kind(&n) {
            Some(MetaKind::Var | MetaKind::Arith) => NamePat::Meta(n),
            Some(_) => return self.err(format!("'{n}' cannot stand for a name")),
            None => NamePat::Lit(n),
        })
    }

    fn pattern(&mut self) -> R<Pattern> {
        if self.peek() == &Tok::Kw(Kw::Def) {
            self.bump();
            let name = self.name_pat()?;
            self.expect_op("(")?;
            let mut params = Vec::new();
            while !self.at_op(")") {
                params.push(self.name_pat()?);
                if !self.eat_op(",") {
                    break;
                }
            }
            self.expect_op(")")?;
            self.expect_op(":")?;
            let body = self.name()?;
            if meta_kind(&body) != Some(MetaKind::Stmt) {
                return self.err("a function pattern body must be a statement metavariable");
            }
            return Ok(Pattern::Func { name, params, body });
        }
        let s = self.tstmt_or_expr(true)?;
        Ok(match s {
            Either::Expr(e) => Pattern::Expr(e),
            Either::Stmt(s) => Pattern::Stmt(s),
        })
    }

    fn tseq(&mut self) -> R<Vec<TStmt>> {
        let mut out = vec![self.tstmt()?];
        while self.eat_op(";") {
            out.push(self.tstmt()?);
        }
        Ok(out)
    }

    fn tstmt(&mut self) -> R<TStmt> {
        if self.at_op("{") {
            self.bump();
            let mut seqs = vec![self.tseq()?];
            while self.eat_op(",") {
                seqs.push(self.tseq()?);
            }
            self.expect_op("}")?;
            return Ok(TStmt::Set(seqs));
        }
        if self.peek() == &Tok::Kw(Kw::If) {
            self.bump();
            let c = self.texpr()?;
            self.expect_op(":")?;
            let t = self.tstmt()?;
            let f = if self.peek() == &Tok::Kw(Kw::Else) {
                self.bump();
                self.expect_op(":")?;
                vec![self.tstmt()?]
            } else {
                vec![]
            };
            return Ok(TStmt::If(c, vec![t], f));
        }
        match self.tstmt_or_expr(false)? {
            Either::Stmt(s) => Ok(s),
            Either::Expr(TExpr::Call { func, args, method }) => Ok(TStmt::Expr(TExpr::Call { func, args, method })),
            Either::Expr(_) => self.err("an expression statement must be a call"),
        }
    }

    fn tstmt_or_expr(&mut self, pattern: bool) -> R<Either> {
        match self.peek() {
            Tok::Kw(Kw::Return) => {
                self.bump();
                return Ok(Either::Stmt(TStmt::Return(self.texpr()?)));
            }
            Tok::Kw(Kw::Pass) => {
                self.bump();
                return Ok(Either::Stmt(TStmt::Pass));
            }
            Tok::Name(n) if meta_kind(n) == Some(MetaKind::Stmt) => {
                let name = n.clone();
                self.bump();
                let primed = !pattern && self.eat_op("'");
                return Ok(Either::Stmt(TStmt::Meta { name, primed }));
            }
            _ => {}
        }
        let e = self.texpr()?;
        let aug = match self.peek() {
            Tok::Op("=") => None,
            Tok::Op("+=") => Some(ArithOp::Add),
            Tok::Op("-=") => Some(ArithOp::Sub),
            Tok::Op("*=") => Some(ArithOp::Mul),
            Tok::Op("/=") => Some(ArithOp::Div),
            Tok::Op("**=") => Some(ArithOp::Pow),
            _ => {
                if pattern && matches!(e, TExpr::Call { .. }) && self.at_op("->") {
                    return Ok(Either::Expr(e));
                }
                return Ok(Either::Expr(e));
            }
        };
        self.bump();
        let rhs = self.texpr()?;
        Ok(Either::Stmt(match aug {
            None => TStmt::Assign(e, rhs),
            Some(op) => TStmt::AugAssign(e, OpRef::Lit(op), rhs),
        }))
    }

    fn texpr(&mut self) -> R<TExpr> {
        let then = self.or_expr()?;
        if self.peek() != &Tok::Kw(Kw::If) {
            return Ok(then);
        }
        self.bump();
        let cond = self.or_expr()?;
        if self.peek() != &Tok::Kw(Kw::Else) {
            return self.err("expected 'else'");
        }
        self.bump();
        let els = self.texpr()?;
        Ok(TExpr::CondExpr { then: Box::new(then), cond: Box::new(cond), els: Box::new(els) })
    }

    fn or_expr(&mut self) -> R<TExpr> {
        let mut l = self.and_expr()?;
        while self.peek() == &Tok::Kw(Kw::Or) {
            self.bump();
            l = TExpr::BoolOp(Box::new(l), BoolOp::Or, Box::new(self.and_expr()?));
        }
        Ok(l)
    }

    fn and_expr(&mut self) -> R<TExpr> {
        let mut l = self.not_expr()?;
        while self.peek() == &Tok::Kw(Kw::And) {
            self.bump();
            l = TExpr::BoolOp(Box::new(l), BoolOp::And, Box::new(self.not_expr()?));
        }
        Ok(l)
    }

    fn not_expr(&mut self) -> R<TExpr> {
        if self.peek() == &Tok::Kw(Kw::Not) {
            self.bump();
            return Ok(TExpr::Not(Box::new(self.not_expr()?)));
        }
        self.comparison()
    }

    fn cmp_op(&mut self) -> R<Option<OpRef<CmpOp>>> {
        let lit = match self.peek() {
            Tok::Op("<") => Some(CmpOp::Lt),
            Tok::Op(">") => Some(CmpOp::Gt),
            Tok::Op("<=") => Some(CmpOp::Le),
            Tok::Op(">=") => Some(CmpOp::Ge),
            Tok::Op("==") => Some(CmpOp::Eq),
            Tok::Op("!=") => Some(CmpOp::Ne),
            _ => None,
        };
        if let Some(op) = lit {
            self.bump();
            return Ok(Some(OpRef::Lit(op)));
        }
        match self.peek().clone() {
            Tok::Name(n) if meta_kind(&n) == Some(MetaKind::CmpOp) => {
                self.bump();
                Ok(Some(OpRef::Meta(n)))
            }
            Tok::Op("~") => {
                self.bump();
                match self.peek().clone() {
                    Tok::Name(n) if meta_kind(&n) == Some(MetaKind::CmpOp) => {
                        self.bump();
                        Ok(Some(OpRef::Any(Some(n))))
                    }
                    _ => Ok(Some(OpRef::Any(None))),
                }
            }
            _ => Ok(None),
        }
    }

    fn comparison(&mut self) -> R<TExpr> {
        let l = self.arith()?;
        let Some(op) = self.cmp_op()? else { return Ok(l) };
        let r = self.arith()?;
        if self.cmp_op()?.is_some() {
            return self.err("chained comparisons are not supported");
        }
        Ok(TExpr::Compare(Box::new(l), op, Box::new(r)))
    }

    fn arith(&mut self) -> R<TExpr> {
        let mut l = self.term()?;
        loop {
            let op = match self.peek().clone() {
                Tok::Op("+") => OpRef::Lit(ArithOp::Add),
                Tok::Op("-") => OpRef::Lit(ArithOp::Sub),
                Tok::Name(n) if meta_kind(&n) == Some(MetaKind::ArithOp) => OpRef::Meta(n),
                Tok::Op("~") if matches!(self.peek2(), Tok::Name(n) if meta_kind(n) == Some(MetaKind::ArithOp)) => {
                    self.bump();
                    let Tok::Name(n) = self.peek().clone() else { unreachable!() };
                    OpRef::Any(Some(n))
                }
                _ => return Ok(l),
            };
            self.bump();
            l = TExpr::BinOp(Box::new(l), op, Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> R<TExpr> {
        let mut l = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Op("*") => ArithOp::Mul,
                Tok::Op("/") => ArithOp::Div,
                _ => return Ok(l),
            };
            self.bump();
            l = TExpr::BinOp(Box::new(l), OpRef::Lit(op), Box::new(self.factor()?));
        }
    }

    fn factor(&mut self) -> R<TExpr> {
        if !self.at_op("-") {
            return self.power();
        }
        self.bump();
        if let (Tok::Int(n), false) = (self.peek().clone(), self.peek2() == &Tok::Op("**")) {
            self.bump();
            return Ok(TExpr::Int(-n));
        }
        let e = self.factor()?;
        Ok(TExpr::BinOp(Box::new(TExpr::Int(0)), OpRef::Lit(ArithOp::Sub), Box::new(e)))
    }

    fn power(&mut self) -> R<TExpr> {
        let base = self.postfix()?;
        if !self.eat_op("**") {
            return Ok(base);
        }
        Ok(TExpr::BinOp(Box::new(base), OpRef::Lit(ArithOp::Pow), Box::new(self.factor()?)))
    }

    fn postfix(&mut self) -> R<TExpr> {
        let mut e = self.atom()?;
        loop {
            if self.eat_op("'") {
                e = match e {
                    TExpr::Meta { name, primed: false } => TExpr::Meta { name, primed: true },
                    TExpr::Primed(_) | TExpr::Meta { primed: true, .. } => return self.err("doubled prime"),
                    other => TExpr::Primed(Box::new(other)),
                };
            } else if self.eat_op("[") {
                let lo = if self.at_op(":") { None } else { Some(Box::new(self.texpr()?)) };
                if self.eat_op(":") {
                    let hi = if self.at_op("]") { None } else { Some(Box::new(self.texpr()?)) };
                    self.expect_op("]")?;
                    e = TExpr::Slice(Box::new(e), lo, hi);
                } else {
                    self.expect_op("]")?;
                    e = TExpr::Index(Box::new(e), lo.unwrap());
                }
            } else if self.at_op(".") {
                self.bump();
                let func = self.name()?;
                self.expect_op("(")?;
                let mut args = vec![e];
                args.extend(self.args()?);
                e = TExpr::Call { func, args, method: true };
            } else {
                return Ok(e);
            }
        }
    }

    /// Arguments up to and including the closing parenthesis.
    fn args(&mut self) -> R<Vec<TExpr>> {
        let mut args = Vec::new();
        while !self.at_op(")") {
            args.push(self.texpr()?);
            if !self.eat_op(",") {
                break;
            }
        }
        self.expect_op(")")?;
        Ok(args)
    }

    fn atom(&mut self) -> R<TExpr> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(TExpr::Int(n))
            }
            Tok::Kw(Kw::True) => {
                self.bump();
                Ok(TExpr::Bool(true))
            }
            Tok::Kw(Kw::False) => {
                self.bump();
                Ok(TExpr::Bool(false))
            }
            Tok::Name(n) => {
                self.bump();
                if self.eat_op("(") {
                    let args = self.args()?;
                    return Ok(TExpr::Call { func: n, args, method: false });
                }
                match meta_kind(&n) {
                    None => Ok(TExpr::Var(n)),
                    Some(MetaKind::Arith | MetaKind::Bool | MetaKind::Var | MetaKind::IntLit) => {
                        Ok(TExpr::Meta { name: n, primed: false })
                    }
                    Some(_) => self.err(format!("metavariable '{n}' cannot appear as an expression")),
                }
            }
            Tok::Op("?") => {
                self.bump();
                Ok(TExpr::Scope(self.name()?))
            }
            Tok::Op("(") => {
                self.bump();
                if self.eat_op(")") {
                    return Ok(TExpr::Tuple(vec![]));
                }
                let first = self.texpr()?;
                if self.at_op(",") {
                    let mut items = vec![first];
                    while self.eat_op(",") && !self.at_op(")") {
                        items.push(self.texpr()?);
                    }
                    self.expect_op(")")?;
                    return Ok(TExpr::Tuple(items));
                }
                self.expect_op(")")?;
                Ok(first)
            }
            Tok::Op("[") => {
                self.bump();
                let mut items = Vec::new();
                while !self.at_op("]") {
                    items.push(self.texpr()?);
                    if !self.eat_op(",") {
                        break;
                    }
                }
                self.expect_op("]")?;
                Ok(TExpr::List(items))
            }
            Tok::Op("{") => {
                self.bump();
                let first = self.texpr()?;
                if self.eat_op("|") {
                    let mut rest = vec![self.texpr()?];
                    while self.eat_op(",") {
                        rest.push(self.texpr()?);
                    }
                    self.expect_op("}")?;
                    return Ok(TExpr::DefaultSet(Box::new(first), rest));
                }
                let mut items = vec![first];
                while self.eat_op(",") {
                    items.push(self.texpr()?);
                }
                self.expect_op("}")?;
                Ok(TExpr::Set(items))
            }
            _ => self.err("expected an expression"),
        }
    }
}

enum Either {
    Expr(TExpr),
    Stmt(TStmt),
}

fn check_rule(rule: &CorrectionRule, at: Span) -> R<()> {
    let fail = |msg: String| Err(SyntaxError::at(at, format!("rule {}: {msg}", rule.id)));
    let mut bound = Vec::new();
    match &rule.lhs {
        Pattern::Expr(e) => {
            if e.has_template_forms() {
                return fail("template forms are not allowed in a pattern".into());
            }
            e.metas(&mut bound);
        }
        Pattern::Stmt(s) => {
            if s.has_template_forms() {
                return fail("template forms are not allowed in a pattern".into());
            }
            s.metas(&mut bound);
        }
        Pattern::Func { name, params, body } => {
            for n in std::iter::once(name).chain(params) {
                if let NamePat::Meta(m) = n {
                    bound.push(m.clone());
                }
            }
            bound.push(body.clone());
        }
    }
    let mut used = Vec::new();
    let mut primes_ok = true;
    match &rule.rhs {
        Template::Expr(e) => {
            e.metas(&mut used);
            primes_ok &= primes_bound(e);
        }
        Template::Stmts(seq) | Template::Func(seq) => {
            for s in seq {
                s.metas(&mut used);
                primes_ok &= stmt_primes_bound(s);
            }
        }
    }
    if let Some(m) = used.iter().find(|m| !bound.contains(m)) {
        return fail(format!("unbound metavariable '{m}'"));
    }
    if !primes_ok {
        return fail("a primed term must contain a metavariable".into());
    }
    Ok(())
}

fn primes_bound(e: &TExpr) -> bool {
    if let TExpr::Primed(inner) = e {
        let mut ms = Vec::new();
        inner.metas(&mut ms);
        if ms.is_empty() {
            return false;
        }
    }
    e.children().iter().all(|c| primes_bound(c))
}

fn stmt_primes_bound(s: &TStmt) -> bool {
    s.exprs().iter().all(|e| primes_bound(e)) && s.blocks().iter().all(|b| b.iter().all(stmt_primes_bound))
}
