// SPDX-License-Identifier: Apache-2.0

//! Random programs and error models shared by the property suites.

#![allow(dead_code)]

pub mod oracle;

use autofix_core::imp::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sp() -> Span {
    Span::default()
}

fn e(kind: ExprKind) -> Expr {
    Expr::new(kind, sp())
}

fn s(kind: StmtKind) -> Stmt {
    Stmt::new(kind, sp())
}

fn bx(x: Expr) -> Box<Expr> {
    Box::new(x)
}

/// Unconstrained expressions: may fault, may mix types.
pub struct AnyGen<'r> {
    pub rng: &'r mut ChaCha8Rng,
    pub vars: Vec<&'static str>,
}

impl AnyGen<'_> {
    pub fn expr(&mut self, depth: u32) -> Expr {
        let r = self.rng.gen_range(0..if depth == 0 { 3 } else { 14 });
        match r {
            0 => e(ExprKind::Int(self.rng.gen_range(-9..10))),
            1 => e(ExprKind::Var(self.vars.choose(self.rng).unwrap().to_string())),
            2 => e(ExprKind::Bool(self.rng.gen())),
            3 => {
                let n = self.rng.gen_range(0..3);
                e(ExprKind::List((0..n).map(|_| self.expr(depth - 1)).collect()))
            }
            4 => e(ExprKind::Index(bx(self.expr(depth - 1)), bx(self.expr(depth - 1)))),
            5 => {
                let lo = self.rng.gen_bool(0.5).then(|| bx(self.expr(depth - 1)));
                let hi = self.rng.gen_bool(0.5).then(|| bx(self.expr(depth - 1)));
                e(ExprKind::Slice(bx(self.expr(depth - 1)), lo, hi))
            }
            6 | 7 => {
                let op = *ArithOp::ALL.choose(self.rng).unwrap();
                e(ExprKind::BinOp(bx(self.expr(depth - 1)), op, bx(self.expr(depth - 1))))
            }
            8 => {
                let op = *CmpOp::ALL.choose(self.rng).unwrap();
                e(ExprKind::Compare(bx(self.expr(depth - 1)), op, bx(self.expr(depth - 1))))
            }
            9 => {
                let op = if self.rng.gen() { BoolOp::And } else { BoolOp::Or };
                e(ExprKind::BoolOp(bx(self.expr(depth - 1)), op, bx(self.expr(depth - 1))))
            }
            10 => e(ExprKind::Not(bx(self.expr(depth - 1)))),
            11 => {
                let (func, n) = if self.rng.gen() { ("len", 1) } else { ("range", self.rng.gen_range(1..4)) };
                e(ExprKind::Call { func: func.into(), args: (0..n).map(|_| self.expr(depth - 1)).collect(), method: false })
            }
            12 => {
                let n = self.rng.gen_range(0..3);
                e(ExprKind::Tuple((0..n).map(|_| self.expr(depth - 1)).collect()))
            }
            _ => e(ExprKind::CondExpr {
                then: bx(self.expr(depth - 1)),
                cond: bx(self.expr(depth - 1)),
                els: bx(self.expr(depth - 1)),
            }),
        }
    }

    fn target(&mut self, depth: u32) -> Expr {
        let v = e(ExprKind::Var(self.vars.choose(self.rng).unwrap().to_string()));
        if depth > 0 && self.rng.gen_bool(0.3) {
            e(ExprKind::Index(bx(v), bx(self.expr(depth - 1))))
        } else {
            v
        }
    }

    pub fn block(&mut self, depth: u32) -> Vec<Stmt> {
        let n = self.rng.gen_range(1..4);
        (0..n).map(|_| self.stmt(depth)).collect()
    }

    pub fn stmt(&mut self, depth: u32) -> Stmt {
        let r = self.rng.gen_range(0..if depth == 0 { 5 } else { 9 });
        let d = depth.saturating_sub(1);
        match r {
            0 | 1 => s(StmtKind::Assign(self.target(d), self.expr(d))),
            2 => s(StmtKind::AugAssign(self.target(d), *ArithOp::ALL.choose(self.rng).unwrap(), self.expr(d))),
            3 => s(StmtKind::Return(self.expr(d))),
            4 => {
                if self.rng.gen() {
                    s(StmtKind::Pass)
                } else {
                    let recv = e(ExprKind::Var(self.vars.choose(self.rng).unwrap().to_string()));
                    s(StmtKind::Expr(e(ExprKind::Call { func: "append".into(), args: vec![recv, self.expr(d)], method: true })))
                }
            }
            5 | 6 => {
                let els = if self.rng.gen() { self.block(d) } else { Vec::new() };
                s(StmtKind::If(self.expr(d), self.block(d), els))
            }
            7 => s(StmtKind::While(self.expr(d), self.block(d))),
            _ => s(StmtKind::For(self.vars.choose(self.rng).unwrap().to_string(), self.expr(d), self.block(d))),
        }
    }

    pub fn program(&mut self, depth: u32) -> Program {
        let body = self.block(depth);
        let f = FuncDef { name: "f".into(), params: vec!["x".into(), "xs".into()], body, span: sp() };
        Program { functions: vec![f], entry: 0, source: "".into() }
    }
}

/// Well-typed integer programs over one `int` or `list_int` parameter that
/// never fault: indexing is always guarded, there is no division and loops
/// iterate over the input list.
pub struct SafeGen<'r> {
    pub rng: &'r mut ChaCha8Rng,
    pub list_param: bool,
    pub ints: Vec<&'static str>,
}

impl SafeGen<'_> {
    pub fn int_expr(&mut self, depth: u32) -> Expr {
        let r = self.rng.gen_range(0..if depth == 0 { 3 } else { 7 });
        match r {
            0 => e(ExprKind::Int(self.rng.gen_range(-2..4))),
            1 | 2 if !self.ints.is_empty() => e(ExprKind::Var(self.ints.choose(self.rng).unwrap().to_string())),
            1 | 2 => e(ExprKind::Int(1)),
            3 if self.list_param => {
                // xs[k] if len(xs) > k else c
                let k = self.rng.gen_range(0..2);
                let idx = e(ExprKind::Index(bx(var("xs")), bx(e(ExprKind::Int(k)))));
                let guard = e(ExprKind::Compare(bx(len_xs()), CmpOp::Gt, bx(e(ExprKind::Int(k)))));
                e(ExprKind::CondExpr { then: bx(idx), cond: bx(guard), els: bx(self.int_expr(0)) })
            }
            3 | 4 => {
                let op = *[ArithOp::Add, ArithOp::Sub, ArithOp::Mul].choose(self.rng).unwrap();
                e(ExprKind::BinOp(bx(self.int_expr(depth - 1)), op, bx(self.int_expr(depth - 1))))
            }
            5 if self.list_param => len_xs(),
            _ => e(ExprKind::CondExpr {
                then: bx(self.int_expr(depth - 1)),
                cond: bx(self.bool_expr(depth - 1)),
                els: bx(self.int_expr(depth - 1)),
            }),
        }
    }

    pub fn bool_expr(&mut self, depth: u32) -> Expr {
        match self.rng.gen_range(0..if depth == 0 { 1 } else { 3 }) {
            0 => {
                let op = *CmpOp::ALL.choose(self.rng).unwrap();
                let d = depth.saturating_sub(1);
                e(ExprKind::Compare(bx(self.int_expr(d)), op, bx(self.int_expr(d))))
            }
            1 => e(ExprKind::Not(bx(self.bool_expr(depth - 1)))),
            _ => {
                let op = if self.rng.gen() { BoolOp::And } else { BoolOp::Or };
                e(ExprKind::BoolOp(bx(self.bool_expr(depth - 1)), op, bx(self.bool_expr(depth - 1))))
            }
        }
    }

    /// `def f_int(x_int)` or `def f_int(xs_list_int)`, returning an int.
    pub fn program(&mut self) -> Program {
        let (short, typed) = if self.list_param { ("xs", "xs_list_int") } else { ("x", "x_int") };
        let mut body = vec![s(StmtKind::Assign(var(short), var(typed)))];
        self.ints = if self.list_param { vec![] } else { vec!["x"] };
        body.push(s(StmtKind::Assign(var("y"), self.int_expr(1))));
        self.ints.push("y");
        if self.list_param {
            self.ints.push("v");
            let inner = vec![s(StmtKind::Assign(var("y"), self.int_expr(2)))];
            self.ints.pop();
            body.push(s(StmtKind::For("v".into(), var("xs"), inner)));
        }
        if self.rng.gen_bool(0.7) {
            let cond = self.bool_expr(1);
            let then = vec![s(StmtKind::Assign(var("y"), self.int_expr(2)))];
            let els =
                if self.rng.gen() { vec![s(StmtKind::AugAssign(var("y"), ArithOp::Add, self.int_expr(1)))] } else { vec![] };
            body.push(s(StmtKind::If(cond, then, els)));
        }
        body.push(s(StmtKind::Return(self.int_expr(2))));
        let f = FuncDef { name: "f_int".into(), params: vec![typed.into()], body, span: sp() };
        Program { functions: vec![f], entry: 0, source: "".into() }
    }
}

fn var(n: &str) -> Expr {
    e(ExprKind::Var(n.into()))
}

fn len_xs() -> Expr {
    e(ExprKind::Call { func: "len".into(), args: vec![var("xs")], method: false })
}

/// Re-parses `p` from its printed form so that every node carries a real span.
pub fn reparse(p: &Program) -> Program {
    parse_imp(&print_program(p)).expect("printed program parses")
}

/// Rules that apply to [`SafeGen`] programs.
pub const SAFE_RULES: &[&str] = &[
    "rule InitF: v = n -> v = {n+1, n-1, 0}",
    "rule CmpF: a0 cop a1 -> a0' ~cop a1'",
    "rule AddF: a0 + a1 -> {a0' - a1', a0'}",
    "rule RetF: return a -> return {a'+1, a'-1, 0}",
    "rule MulF weight 2: a0 * a1 -> {a0' + a1', a1'}",
    "rule RetV: return v -> return ?v",
    "rule SubF: a0 - a1 -> a0' + a1'",
    "rule IncF: v += a -> v -= a'",
    "rule NotF: not b -> b'",
    "rule CondF weight 2: a0 if b else a1 -> {a1' if b' else a0', a0'}",
    "rule AsgF: v = a -> v = {a' + 1, a' - 1}",
];

/// Two to four distinct rules of [`SAFE_RULES`], in pool order.
pub fn safe_model(rng: &mut ChaCha8Rng) -> String {
    let n = rng.gen_range(2..=4);
    let mut picked: Vec<usize> = rand::seq::index::sample(rng, SAFE_RULES.len(), n).into_vec();
    picked.sort();
    picked.iter().map(|&i| SAFE_RULES[i]).collect::<Vec<_>>().join("\n")
}

/// Random error models, mostly well-formed.
pub struct ModelFuzzer<'r> {
    pub rng: &'r mut ChaCha8Rng,
}

enum Kind {
    Arith,
    Bool,
    Stmt(&'static str),
}

impl ModelFuzzer<'_> {
    fn arith(&mut self, metas: &[&str], depth: u32) -> String {
        let r = self.rng.gen_range(0..if depth == 0 { 3 } else { 9 });
        let m = *metas.choose(self.rng).unwrap();
        match r {
            0 => m.to_string(),
            1 => format!("{m}'"),
            2 => self.rng.gen_range(0..3).to_string(),
            3 => format!("({} + {})", self.arith(metas, depth - 1), self.arith(metas, depth - 1)),
            4 => format!("({} - {})", self.arith(metas, depth - 1), self.arith(metas, depth - 1)),
            5 => format!("{{{}, {}}}", self.arith(metas, depth - 1), self.arith(metas, depth - 1)),
            6 => format!("{{{} | {}, {}}}", self.arith(metas, depth - 1), self.arith(metas, depth - 1), self.arith(metas, 0)),
            7 => format!("?{m}"),
            _ => format!("({})'", self.arith(metas, depth - 1)),
        }
    }

    fn boolean(&mut self, metas: &[&str], depth: u32) -> String {
        match self.rng.gen_range(0..if depth == 0 { 2 } else { 5 }) {
            0 => format!("{} ~cop {}", self.arith(metas, 1), self.arith(metas, 1)),
            1 => ["True", "False"].choose(self.rng).unwrap().to_string(),
            2 => format!("{} cop {}", self.arith(metas, 1), self.arith(metas, 1)),
            3 => format!("{{{}, {}}}", self.boolean(metas, depth - 1), self.boolean(metas, depth - 1)),
            _ => format!("not ({})", self.boolean(metas, depth - 1)),
        }
    }

    fn rule(&mut self, id: usize) -> String {
        const PATTERNS: &[(&str, &[&str], Kind)] = &[
            ("v[a]", &["a"], Kind::Arith),
            ("a0 + a1", &["a0", "a1"], Kind::Arith),
            ("a0 - a1", &["a0", "a1"], Kind::Arith),
            ("a0 * a1", &["a0", "a1"], Kind::Arith),
            ("len(a)", &["a"], Kind::Arith),
            ("a0 cop a1", &["a0", "a1"], Kind::Bool),
            ("v = n", &["n"], Kind::Stmt("v = ")),
            ("v = a", &["a"], Kind::Stmt("v = ")),
            ("return a", &["a"], Kind::Stmt("return ")),
            ("v += a", &["a"], Kind::Stmt("v -= ")),
        ];
        let (lhs, metas, kind) = PATTERNS.choose(self.rng).unwrap();
        let rhs = match kind {
            Kind::Arith => self.arith(metas, 2),
            Kind::Bool => self.boolean(metas, 2),
            Kind::Stmt(head) => format!("{head}{}", self.arith(metas, 2)),
        };
        let weight = self.rng.gen_range(1..=2);
        format!("rule F{id} weight {weight}: {lhs} -> {rhs}")
    }

    pub fn model(&mut self) -> String {
        let n = self.rng.gen_range(1..=4);
        (0..n).map(|i| self.rule(i)).collect::<Vec<_>>().join("\n")
    }
}

/// A small repair problem: a student tilde and an oracle for a reference
/// that is usually one of the tilde's own programs.
pub struct Instance {
    pub tilde: autofix_core::tilde::TildeProgram,
    pub oracle: autofix_core::search::ReferenceOracle,
}

pub const SMALL: Bounds = Bounds { int_bits: 3, max_list_len: 3, fuel: 10_000 };

/// An instance with at most `max_sites` sites and `max_candidates`
/// candidates, or `None` when this seed does not give one.
pub fn instance(seed: u64, max_sites: usize, max_candidates: usize) -> Option<Instance> {
    use autofix_core::tilde::SiteForest;
    let mut rng = rng(seed);
    let student = reparse(&SafeGen { rng: &mut rng, list_param: seed.is_multiple_of(2), ints: vec![] }.program());
    let model = autofix_core::eml::parse_eml(&safe_model(&mut rng)).unwrap();
    let tilde = autofix_core::eml::rewrite(&student, &model).ok()?;
    if tilde.sites.is_empty() || tilde.sites.len() > max_sites {
        return None;
    }
    let all: Vec<_> = SiteForest::new(&tilde).stream(u32::MAX).take(max_candidates + 1).collect();
    if all.len() > max_candidates {
        return None;
    }
    let reference = if rng.gen_bool(0.8) {
        let (a, _) = all.choose(&mut rng).unwrap();
        tilde.instantiate(a).unwrap().program
    } else {
        reparse(&SafeGen { rng: &mut rng, list_param: seed.is_multiple_of(2), ints: vec![] }.program())
    };
    let oracle = autofix_core::search::ReferenceOracle::new(&reference, SMALL).ok()?;
    Some(Instance { tilde, oracle })
}

/// The first `n` instances from consecutive seeds starting at `from`.
pub fn instances(from: u64, n: usize, max_sites: usize, max_candidates: usize) -> Vec<Instance> {
    (from..).filter_map(|s| instance(s, max_sites, max_candidates)).take(n).collect()
}
