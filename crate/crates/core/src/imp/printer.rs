// SPDX-License-Identifier: Apache-2.0

//! The normative formatter: four-space indentation, minimal parentheses.

use super::ast::*;

/// Renders choice nodes; plain programs never reach it.
pub trait ChoicePrinter {
    fn expr_choice(&self, out: &mut String, site: SiteId, prec: u8);
    fn block_choice(&self, out: &mut String, site: SiteId, indent: usize);
}

struct Placeholder;

impl ChoicePrinter for Placeholder {
    fn expr_choice(&self, out: &mut String, site: SiteId, _: u8) {
        out.push_str(&format!("<site {site}>"));
    }
    fn block_choice(&self, out: &mut String, site: SiteId, indent: usize) {
        pad(out, indent);
        out.push_str(&format!("<site {site}>\n"));
    }
}

pub const PREC_COND: u8 = 0;
const PREC_OR: u8 = 1;
const PREC_AND: u8 = 2;
const PREC_NOT: u8 = 3;
const PREC_CMP: u8 = 4;
const PREC_ADD: u8 = 5;
const PREC_MUL: u8 = 6;
const PREC_UNARY: u8 = 7;
const PREC_POW: u8 = 8;
pub const PREC_ATOM: u8 = 9;

pub fn precedence(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::CondExpr { .. } => PREC_COND,
        ExprKind::BoolOp(_, BoolOp::Or, _) => PREC_OR,
        ExprKind::BoolOp(_, BoolOp::And, _) => PREC_AND,
        ExprKind::Not(_) => PREC_NOT,
        ExprKind::Compare(..) => PREC_CMP,
        ExprKind::BinOp(_, ArithOp::Add | ArithOp::Sub, _) => PREC_ADD,
        ExprKind::BinOp(_, ArithOp::Mul | ArithOp::Div, _) => PREC_MUL,
        ExprKind::BinOp(_, ArithOp::Pow, _) => PREC_POW,
        ExprKind::Int(n) if *n < 0 => PREC_UNARY,
        _ => PREC_ATOM,
    }
}

pub fn print_program(p: &Program) -> String {
    print_program_with(p, &Placeholder)
}

pub fn print_program_with(p: &Program, cp: &dyn ChoicePrinter) -> String {
    let mut out = String::new();
    for (i, f) in p.functions.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        write_func(&mut out, f, cp);
    }
    out
}

pub fn write_func(out: &mut String, f: &FuncDef, cp: &dyn ChoicePrinter) {
    out.push_str(&format!("def {}({}):\n", f.name, f.params.join(", ")));
    write_block(out, &f.body, 1, cp);
}

pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e, PREC_COND, &Placeholder);
    out
}

/// Prints `e` as it would appear in a context requiring precedence `prec`.
pub fn print_expr_in(e: &Expr, prec: u8) -> String {
    let mut out = String::new();
    write_expr(&mut out, e, prec, &Placeholder);
    out
}

pub fn print_block(b: &[Stmt], indent: usize) -> String {
    let mut out = String::new();
    write_block(&mut out, b, indent, &Placeholder);
    out
}

/// One-line rendering of a simple statement, or the header of a compound one.
pub fn print_stmt_head(s: &Stmt) -> String {
    let text = print_block(std::slice::from_ref(s), 0);
    text.lines().next().unwrap_or("").trim_end_matches(':').to_string()
}

pub fn pad(out: &mut String, indent: usize) {
    for _ in 0..indent {
        out.push_str("    ");
    }
}

pub fn write_block(out: &mut String, b: &[Stmt], indent: usize, cp: &dyn ChoicePrinter) {
    for s in b {
        write_stmt(out, s, indent, cp);
    }
}

pub fn write_stmt(out: &mut String, s: &Stmt, indent: usize, cp: &dyn ChoicePrinter) {
    if let StmtKind::Choice(site) = s.kind {
        cp.block_choice(out, site, indent);
        return;
    }
    pad(out, indent);
    match &s.kind {
        StmtKind::Assign(t, e) => {
            write_expr(out, t, PREC_COND, cp);
            out.push_str(" = ");
            write_expr(out, e, PREC_COND, cp);
        }
        StmtKind::AugAssign(t, op, e) => {
            write_expr(out, t, PREC_COND, cp);
            out.push_str(&format!(" {}= ", op.symbol()));
            write_expr(out, e, PREC_COND, cp);
        }
        StmtKind::Expr(e) => write_expr(out, e, PREC_COND, cp),
        StmtKind::Return(e) => {
            out.push_str("return ");
            write_expr(out, e, PREC_COND, cp);
        }
        StmtKind::Pass => out.push_str("pass"),
        StmtKind::If(c, t, f) => {
            out.push_str("if ");
            write_expr(out, c, PREC_COND, cp);
            out.push_str(":\n");
            write_block(out, t, indent + 1, cp);
            let mut els = f;
            loop {
                match els.as_slice() {
                    [] => return,
                    [Stmt { kind: StmtKind::If(c, t, f), .. }] => {
                        pad(out, indent);
                        out.push_str("elif ");
                        write_expr(out, c, PREC_COND, cp);
                        out.push_str(":\n");
                        write_block(out, t, indent + 1, cp);
                        els = f;
                    }
                    _ => {
                        pad(out, indent);
                        out.push_str("else:\n");
                        write_block(out, els, indent + 1, cp);
                        return;
                    }
                }
            }
        }
        StmtKind::While(c, b) => {
            out.push_str("while ");
            write_expr(out, c, PREC_COND, cp);
            out.push_str(":\n");
            write_block(out, b, indent + 1, cp);
            return;
        }
        StmtKind::For(v, it, b) => {
            out.push_str(&format!("for {v} in "));
            write_expr(out, it, PREC_COND, cp);
            out.push_str(":\n");
            write_block(out, b, indent + 1, cp);
            return;
        }
        StmtKind::Choice(_) => unreachable!(),
    }
    out.push('\n');
}

fn write_list(out: &mut String, es: &[Expr], cp: &dyn ChoicePrinter) {
    for (i, e) in es.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_expr(out, e, PREC_COND, cp);
    }
}

pub fn write_expr(out: &mut String, e: &Expr, prec: u8, cp: &dyn ChoicePrinter) {
    if let ExprKind::Choice(site) = e.kind {
        cp.expr_choice(out, site, prec);
        return;
    }
    let own = precedence(e);
    let paren = own < prec;
    if paren {
        out.push('(');
    }
    match &e.kind {
        ExprKind::Int(n) => out.push_str(&n.to_string()),
        ExprKind::Bool(b) => out.push_str(if *b { "True" } else { "False" }),
        ExprKind::Var(v) => out.push_str(v),
        ExprKind::List(es) => {
            out.push('[');
            write_list(out, es, cp);
            out.push(']');
        }
        ExprKind::Tuple(es) => {
            out.push('(');
            write_list(out, es, cp);
            if es.len() == 1 {
                out.push(',');
            }
            out.push(')');
        }
        ExprKind::Index(b, i) => {
            write_expr(out, b, PREC_ATOM, cp);
            out.push('[');
            write_expr(out, i, PREC_COND, cp);
            out.push(']');
        }
        ExprKind::Slice(b, lo, hi) => {
            write_expr(out, b, PREC_ATOM, cp);
            out.push('[');
            if let Some(lo) = lo {
                write_expr(out, lo, PREC_COND, cp);
            }
            out.push(':');
            if let Some(hi) = hi {
                write_expr(out, hi, PREC_COND, cp);
            }
            out.push(']');
        }
        ExprKind::BinOp(l, ArithOp::Pow, r) => {
            write_expr(out, l, PREC_ATOM, cp);
            out.push_str(" ** ");
            write_expr(out, r, PREC_UNARY, cp);
        }
        ExprKind::BinOp(l, op, r) => {
            write_expr(out, l, own, cp);
            out.push_str(&format!(" {} ", op.symbol()));
            write_expr(out, r, own + 1, cp);
        }
        ExprKind::Compare(l, op, r) => {
            write_expr(out, l, PREC_ADD, cp);
            out.push_str(&format!(" {} ", op.symbol()));
            write_expr(out, r, PREC_ADD, cp);
        }
        ExprKind::BoolOp(l, op, r) => {
            write_expr(out, l, own, cp);
            out.push_str(&format!(" {} ", op.symbol()));
            write_expr(out, r, own + 1, cp);
        }
        ExprKind::Not(a) => {
            out.push_str("not ");
            write_expr(out, a, PREC_NOT, cp);
        }
        ExprKind::Call { func, args, method: true } => {
            write_expr(out, &args[0], PREC_ATOM, cp);
            out.push_str(&format!(".{func}("));
            write_list(out, &args[1..], cp);
            out.push(')');
        }
        ExprKind::Call { func, args, method: false } => {
            out.push_str(func);
            out.push('(');
            write_list(out, args, cp);
            out.push(')');
        }
        ExprKind::CondExpr { then, cond, els } => {
            write_expr(out, then, PREC_OR, cp);
            out.push_str(" if ");
            write_expr(out, cond, PREC_OR, cp);
            out.push_str(" else ");
            write_expr(out, els, PREC_COND, cp);
        }
        ExprKind::Choice(_) => unreachable!(),
    }
    if paren {
        out.push(')');
    }
}

/// The precedence each child of `e` is printed at, in [`Expr::children`] order.
pub fn child_precedences(e: &Expr) -> Vec<u8> {
    let own = precedence(e);
    match &e.kind {
        ExprKind::Index(..) => vec![PREC_ATOM, PREC_COND],
        ExprKind::Slice(_, lo, hi) => {
            let mut v = vec![PREC_ATOM];
            v.extend(lo.iter().chain(hi).map(|_| PREC_COND));
            v
        }
        ExprKind::BinOp(_, ArithOp::Pow, _) => vec![PREC_ATOM, PREC_UNARY],
        ExprKind::BinOp(..) | ExprKind::BoolOp(..) => vec![own, own + 1],
        ExprKind::Compare(..) => vec![PREC_ADD, PREC_ADD],
        ExprKind::Not(_) => vec![PREC_NOT],
        ExprKind::Call { args, method: true, .. } => {
            let mut v = vec![PREC_ATOM];
            v.extend(args[1..].iter().map(|_| PREC_COND));
            v
        }
        ExprKind::CondExpr { .. } => vec![PREC_OR, PREC_OR, PREC_COND],
        _ => e.children().iter().map(|_| PREC_COND).collect(),
    }
}
