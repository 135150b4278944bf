// SPDX-License-Identifier: Apache-2.0

use std::sync::Arc;

use super::ast::*;
use super::value::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Bounds {
    pub int_bits: u32,
    pub max_list_len: usize,
    pub fuel: u64,
}

impl Default for Bounds {
    fn default() -> Bounds {
        Bounds { int_bits: 4, max_list_len: 4, fuel: 100_000 }
    }
}

impl Bounds {
    pub fn min_int(&self) -> i64 {
        -(1i64 << (self.int_bits - 1))
    }

    pub fn max_int(&self) -> i64 {
        (1i64 << (self.int_bits - 1)) - 1
    }

    /// Reduces `n` to the W-bit two's-complement range.
    pub fn wrap(&self, n: i64) -> i64 {
        let shift = 64 - self.int_bits;
        (n << shift) >> shift
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(1..=63).contains(&self.int_bits) {
            return Err(format!("int-bits must be in 1..=63, got {}", self.int_bits));
        }
        if self.fuel == 0 {
            return Err("fuel must be at least 1".into());
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FaultKind {
    IndexOutOfRange,
    TypeMismatch,
    DivByZero,
    FuelExhausted,
    NoReturn,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fault {
    pub kind: FaultKind,
    pub span: Span,
}

pub type EvalResult = Result<Value, Fault>;

/// Supplies the selected alternative of each choice site during evaluation.
pub trait Resolver {
    fn expr(&self, site: SiteId) -> &Expr;
    fn block(&self, site: SiteId) -> &[Stmt];
}

/// Resolver for programs without choice sites.
pub struct NoChoices;

static EMPTY_EXPR: Expr = Expr { kind: ExprKind::Bool(false), span: Span { start: 0, end: 0, line: 0, col: 0 } };

impl Resolver for NoChoices {
    fn expr(&self, _: SiteId) -> &Expr {
        &EMPTY_EXPR
    }
    fn block(&self, _: SiteId) -> &[Stmt] {
        &[]
    }
}

const MAX_CALL_DEPTH: usize = 256;

/// Runs the entry function of `program` on `args`.
pub fn evaluate(program: &Program, args: &[Value], bounds: &Bounds) -> EvalResult {
    Machine::new(&program.functions, &[], &NoChoices, bounds).call(program.entry_fn(), args, program.entry_fn().span)
}

/// A single evaluation: functions are looked up in `funcs` first, then in `library`.
pub struct Machine<'a, R: Resolver + ?Sized> {
    funcs: &'a [FuncDef],
    library: &'a [FuncDef],
    resolver: &'a R,
    bounds: Bounds,
    fuel: u64,
    depth: usize,
}

enum Flow {
    Normal,
    Return(Value),
}

type Env<'a> = Vec<(&'a str, Value)>;

fn fault<T>(kind: FaultKind, span: Span) -> Result<T, Fault> {
    Err(Fault { kind, span })
}

impl<'a, R: Resolver + ?Sized> Machine<'a, R> {
    pub fn new(funcs: &'a [FuncDef], library: &'a [FuncDef], resolver: &'a R, bounds: &Bounds) -> Self {
        Machine { funcs, library, resolver, bounds: *bounds, fuel: bounds.fuel, depth: 0 }
    }

    fn lookup_fn(&self, name: &str) -> Option<&'a FuncDef> {
        self.funcs.iter().chain(self.library).find(|f| f.name == name)
    }

    fn tick(&mut self, span: Span) -> Result<(), Fault> {
        if self.fuel == 0 {
            return fault(FaultKind::FuelExhausted, span);
        }
        self.fuel -= 1;
        Ok(())
    }

    pub fn call(&mut self, f: &'a FuncDef, args: &[Value], span: Span) -> EvalResult {
        if args.len() != f.params.len() {
            return fault(FaultKind::TypeMismatch, span);
        }
        if self.depth >= MAX_CALL_DEPTH {
            return fault(FaultKind::FuelExhausted, f.span);
        }
        self.depth += 1;
        let mut env: Env<'a> = f.params.iter().map(String::as_str).zip(args.iter().cloned()).collect();
        let flow = self.block(&f.body, &mut env).map_err(|e| {
            if e.kind == FaultKind::FuelExhausted {
                Fault { kind: e.kind, span: f.span }
            } else {
                e
            }
        });
        self.depth -= 1;
        match flow? {
            Flow::Return(v) => Ok(v),
            Flow::Normal => fault(FaultKind::NoReturn, f.span),
        }
    }

    fn block(&mut self, b: &'a [Stmt], env: &mut Env<'a>) -> Result<Flow, Fault> {
        for s in b {
            if let Flow::Return(v) = self.stmt(s, env)? {
                return Ok(Flow::Return(v));
            }
        }
        Ok(Flow::Normal)
    }

    fn cond(&mut self, e: &'a Expr, env: &mut Env<'a>) -> Result<bool, Fault> {
        match self.expr(e, env)? {
            Value::Bool(b) => Ok(b),
            _ => fault(FaultKind::TypeMismatch, e.span),
        }
    }

    fn stmt(&mut self, s: &'a Stmt, env: &mut Env<'a>) -> Result<Flow, Fault> {
        if let StmtKind::Choice(site) = s.kind {
            return self.block(self.resolver.block(site), env);
        }
        self.tick(s.span)?;
        match &s.kind {
            StmtKind::Assign(t, e) => {
                let v = self.expr(e, env)?;
                self.assign(t, v, env)?;
            }
            StmtKind::AugAssign(t, op, e) => {
                let old = self.expr(t, env)?;
                let rhs = self.expr(e, env)?;
                let v = self.arith(*op, old, rhs, s.span)?;
                self.assign(t, v, env)?;
            }
            StmtKind::Expr(e) => match &e.kind {
                ExprKind::Call { func, args, method: true } if func == "append" && args.len() == 2 => {
                    self.tick(e.span)?;
                    let item = self.expr(&args[1], env)?;
                    let target = self.place(&args[0], env)?;
                    match target {
                        Value::List(xs) => Arc::make_mut(xs).push(item),
                        _ => return fault(FaultKind::TypeMismatch, e.span),
                    }
                }
                _ => {
                    self.expr(e, env)?;
                }
            },
            StmtKind::If(c, t, f) => {
                return if self.cond(c, env)? { self.block(t, env) } else { self.block(f, env) };
            }
            StmtKind::While(c, body) => {
                while self.cond(c, env)? {
                    if let Flow::Return(v) = self.block(body, env)? {
                        return Ok(Flow::Return(v));
                    }
                    self.tick(s.span)?;
                }
            }
            StmtKind::For(var, it, body) => {
                let items = match self.expr(it, env)? {
                    Value::List(xs) | Value::Tuple(xs) => xs,
                    _ => return fault(FaultKind::TypeMismatch, it.span),
                };
                for item in items.iter() {
                    set_var(env, var, item.clone());
                    if let Flow::Return(v) = self.block(body, env)? {
                        return Ok(Flow::Return(v));
                    }
                    self.tick(s.span)?;
                }
            }
            StmtKind::Return(e) => return Ok(Flow::Return(self.expr(e, env)?)),
            StmtKind::Pass => {}
            StmtKind::Choice(_) => unreachable!(),
        }
        Ok(Flow::Normal)
    }

    fn assign(&mut self, target: &'a Expr, v: Value, env: &mut Env<'a>) -> Result<(), Fault> {
        let slot = self.place(target, env)?;
        *slot = v;
        Ok(())
    }

    /// Resolves an assignable expression to the storage it names. A fresh
    /// variable is created when `target` is a bare name.
    fn place<'e>(&mut self, target: &'a Expr, env: &'e mut Env<'a>) -> Result<&'e mut Value, Fault> {
        let mut path = Vec::new();
        let mut cur = target;
        loop {
            match &cur.kind {
                ExprKind::Var(_) => break,
                ExprKind::Index(b, i) => {
                    path.push((i.as_ref(), cur.span));
                    cur = b;
                }
                ExprKind::Choice(site) => cur = self.resolver.expr(*site),
                _ => return fault(FaultKind::TypeMismatch, cur.span),
            }
        }
        let ExprKind::Var(name) = &cur.kind else { unreachable!() };
        let mut idx = Vec::with_capacity(path.len());
        for (i, span) in path.iter().rev() {
            match self.expr(i, env)? {
                Value::Int(n) => idx.push((n, *span)),
                _ => return fault(FaultKind::TypeMismatch, i.span),
            }
        }
        let pos = match env.iter().rposition(|(n, _)| *n == name.as_str()) {
            Some(p) => p,
            None if idx.is_empty() => {
                env.push((name.as_str(), Value::Int(0)));
                env.len() - 1
            }
            None => return fault(FaultKind::TypeMismatch, cur.span),
        };
        let mut slot = &mut env[pos].1;
        for (n, span) in idx {
            slot = match slot {
                Value::List(xs) => {
                    if n < 0 || n as usize >= xs.len() {
                        return fault(FaultKind::IndexOutOfRange, span);
                    }
                    &mut Arc::make_mut(xs)[n as usize]
                }
                _ => return fault(FaultKind::TypeMismatch, span),
            };
        }
        Ok(slot)
    }

    fn int(&mut self, e: &'a Expr, env: &mut Env<'a>) -> Result<i64, Fault> {
        match self.expr(e, env)? {
            Value::Int(n) => Ok(n),
            _ => fault(FaultKind::TypeMismatch, e.span),
        }
    }

    fn expr(&mut self, e: &'a Expr, env: &mut Env<'a>) -> EvalResult {
        if let ExprKind::Choice(site) = e.kind {
            return self.expr(self.resolver.expr(site), env);
        }
        self.tick(e.span)?;
        match &e.kind {
            ExprKind::Int(n) => Ok(Value::Int(self.bounds.wrap(*n))),
            ExprKind::Bool(b) => Ok(Value::Bool(*b)),
            ExprKind::Var(name) => match env.iter().rev().find(|(n, _)| *n == name.as_str()) {
                Some((_, v)) => Ok(v.clone()),
                None => fault(FaultKind::TypeMismatch, e.span),
            },
            ExprKind::List(items) | ExprKind::Tuple(items) => {
                let mut vs = Vec::with_capacity(items.len());
                for it in items {
                    vs.push(self.expr(it, env)?);
                }
                Ok(match e.kind {
                    ExprKind::List(_) => Value::list(vs),
                    _ => Value::Tuple(Arc::new(vs)),
                })
            }
            ExprKind::Index(b, i) => {
                let base = self.expr(b, env)?;
                let n = self.int(i, env)?;
                match &base {
                    Value::List(xs) | Value::Tuple(xs) => {
                        if n < 0 || n as usize >= xs.len() {
                            fault(FaultKind::IndexOutOfRange, e.span)
                        } else {
                            Ok(xs[n as usize].clone())
                        }
                    }
                    _ => fault(FaultKind::TypeMismatch, e.span),
                }
            }
            ExprKind::Slice(b, lo, hi) => {
                let base = self.expr(b, env)?;
                let lo = match lo {
                    Some(x) => Some(self.int(x, env)?),
                    None => None,
                };
                let hi = match hi {
                    Some(x) => Some(self.int(x, env)?),
                    None => None,
                };
                let (Value::List(xs) | Value::Tuple(xs)) = &base else {
                    return fault(FaultKind::TypeMismatch, e.span);
                };
                let len = xs.len() as i64;
                let lo = lo.unwrap_or(0).clamp(0, len) as usize;
                let hi = hi.unwrap_or(len).clamp(0, len) as usize;
                let part = if lo < hi { xs[lo..hi].to_vec() } else { Vec::new() };
                Ok(match base {
                    Value::List(_) => Value::list(part),
                    _ => Value::Tuple(Arc::new(part)),
                })
            }
            ExprKind::BinOp(l, op, r) => {
                let a = self.expr(l, env)?;
                let b = self.expr(r, env)?;
                self.arith(*op, a, b, e.span)
            }
            ExprKind::Compare(l, op, r) => {
                let a = self.expr(l, env)?;
                let b = self.expr(r, env)?;
                if std::mem::discriminant(&a) != std::mem::discriminant(&b) {
                    return fault(FaultKind::TypeMismatch, e.span);
                }
                Ok(Value::Bool(match op {
                    CmpOp::Lt => a < b,
                    CmpOp::Gt => a > b,
                    CmpOp::Le => a <= b,
                    CmpOp::Ge => a >= b,
                    CmpOp::Eq => a == b,
                    CmpOp::Ne => a != b,
                }))
            }
            ExprKind::BoolOp(l, op, r) => {
                let a = self.cond(l, env)?;
                match (op, a) {
                    (BoolOp::And, false) => Ok(Value::Bool(false)),
                    (BoolOp::Or, true) => Ok(Value::Bool(true)),
                    _ => Ok(Value::Bool(self.cond(r, env)?)),
                }
            }
            ExprKind::Not(a) => Ok(Value::Bool(!self.cond(a, env)?)),
            ExprKind::CondExpr { then, cond, els } => {
                if self.cond(cond, env)? {
                    self.expr(then, env)
                } else {
                    self.expr(els, env)
                }
            }
            ExprKind::Call { func, args, method } => self.call_expr(func, args, *method, e.span, env),
            ExprKind::Choice(_) => unreachable!(),
        }
    }

    fn call_expr(&mut self, func: &str, args: &'a [Expr], method: bool, span: Span, env: &mut Env<'a>) -> EvalResult {
        let mut vs = Vec::with_capacity(args.len());
        for a in args {
            vs.push(self.expr(a, env)?);
        }
        if method {
            // `append` only makes sense as a statement.
            return fault(FaultKind::TypeMismatch, span);
        }
        match func {
            "len" => match vs.as_slice() {
                [Value::List(xs) | Value::Tuple(xs)] => Ok(Value::Int(self.bounds.wrap(xs.len() as i64))),
                _ => fault(FaultKind::TypeMismatch, span),
            },
            "range" => {
                let ns: Option<Vec<i64>> = vs.iter().map(|v| if let Value::Int(n) = v { Some(*n) } else { None }).collect();
                let (lo, hi, step) = match ns.as_deref() {
                    Some(&[hi]) => (0, hi, 1),
                    Some(&[lo, hi]) => (lo, hi, 1),
                    Some(&[lo, hi, step]) if step > 0 => (lo, hi, step),
                    _ => return fault(FaultKind::TypeMismatch, span),
                };
                let count = if hi > lo { ((hi - lo - 1) / step + 1) as u64 } else { 0 };
                if count > self.fuel {
                    self.fuel = 0;
                    return fault(FaultKind::FuelExhausted, span);
                }
                self.fuel -= count;
                Ok(Value::list((0..count as i64).map(|k| Value::Int(self.bounds.wrap(lo + k * step))).collect()))
            }
            _ => match self.lookup_fn(func) {
                Some(f) => self.call(f, &vs, span),
                None => fault(FaultKind::TypeMismatch, span),
            },
        }
    }

    fn arith(&self, op: ArithOp, a: Value, b: Value, span: Span) -> EvalResult {
        let w = |n: i64| Value::Int(self.bounds.wrap(n));
        match (op, a, b) {
            (ArithOp::Add, Value::Int(x), Value::Int(y)) => Ok(w(x.wrapping_add(y))),
            (ArithOp::Sub, Value::Int(x), Value::Int(y)) => Ok(w(x.wrapping_sub(y))),
            (ArithOp::Mul, Value::Int(x), Value::Int(y)) => Ok(w(x.wrapping_mul(y))),
            (ArithOp::Div, Value::Int(_), Value::Int(0)) => fault(FaultKind::DivByZero, span),
            (ArithOp::Div, Value::Int(x), Value::Int(y)) => Ok(w(x.wrapping_div(y))),
            (ArithOp::Pow, Value::Int(_), Value::Int(y)) if y < 0 => fault(FaultKind::TypeMismatch, span),
            (ArithOp::Pow, Value::Int(x), Value::Int(y)) => {
                let (mut base, mut exp, mut acc) = (x, y as u64, 1i64);
                while exp > 0 {
                    if exp & 1 == 1 {
                        acc = acc.wrapping_mul(base);
                    }
                    base = base.wrapping_mul(base);
                    exp >>= 1;
                }
                Ok(w(acc))
            }
            (ArithOp::Add, Value::List(x), Value::List(y)) => Ok(Value::list(concat(&x, &y))),
            (ArithOp::Add, Value::Tuple(x), Value::Tuple(y)) => Ok(Value::Tuple(Arc::new(concat(&x, &y)))),
            _ => fault(FaultKind::TypeMismatch, span),
        }
    }
}

fn concat(x: &[Value], y: &[Value]) -> Vec<Value> {
    let mut v = Vec::with_capacity(x.len() + y.len());
    v.extend_from_slice(x);
    v.extend_from_slice(y);
    v
}

fn set_var<'a>(env: &mut Env<'a>, name: &'a str, v: Value) {
    match env.iter_mut().rev().find(|(n, _)| *n == name) {
        Some(slot) => slot.1 = v,
        None => env.push((name, v)),
    }
}
