// SPDX-License-Identifier: Apache-2.0

//! Reference implementations the search and enumeration are checked against.
//! They share no code with the library beyond the AST and the interpreter.

use autofix_core::imp::*;
use autofix_core::search::ReferenceOracle;
use autofix_core::tilde::{Fragment, TildeProgram};

type Costed<T> = Vec<(T, u32)>;

fn product<T: Clone>(parts: Vec<Costed<T>>, k: u32) -> Costed<Vec<T>> {
    let mut acc: Costed<Vec<T>> = vec![(Vec::new(), 0)];
    for part in parts {
        let mut next = Vec::with_capacity(acc.len() * part.len());
        for (prefix, c) in &acc {
            for (x, d) in part.iter().filter(|(_, d)| c + d <= k) {
                let mut v = prefix.clone();
                v.push(x.clone());
                next.push((v, c + d));
            }
        }
        acc = next;
    }
    acc
}

fn choice_expr(t: &TildeProgram, site: usize, k: u32) -> Costed<Expr> {
    let mut out = Vec::new();
    for alt in t.sites[site].alternatives.iter().filter(|a| a.weight <= k) {
        let Fragment::Expr(e) = &alt.fragment else { panic!("block fragment in expression position") };
        out.extend(expand_expr(t, e, k - alt.weight).into_iter().map(|(x, c)| (x, c + alt.weight)));
    }
    out
}

/// Every instance of `e` with its cost: a choice costs the weight of the
/// alternative taken plus that alternative's own cost; any other node costs
/// the sum over its children. Instances costing more than `k` are dropped.
pub fn expand_expr(t: &TildeProgram, e: &Expr, k: u32) -> Costed<Expr> {
    if let ExprKind::Choice(s) = e.kind {
        return choice_expr(t, s, k);
    }
    let kids: Vec<Costed<Expr>> = e.children().into_iter().map(|c| expand_expr(t, c, k)).collect();
    product(kids, k)
        .into_iter()
        .map(|(cs, c)| {
            let mut x = e.clone();
            for (slot, v) in x.children_mut().into_iter().zip(cs) {
                *slot = v;
            }
            (x, c)
        })
        .collect()
}

/// Instances of a statement, as the statements they stand for.
pub fn expand_stmt(t: &TildeProgram, s: &Stmt, k: u32) -> Costed<Vec<Stmt>> {
    use StmtKind::*;
    let one = |k: StmtKind| vec![Stmt::new(k, s.span)];
    match &s.kind {
        Choice(site) => {
            let mut out = Vec::new();
            for alt in t.sites[*site].alternatives.iter().filter(|a| a.weight <= k) {
                let Fragment::Block(b) = &alt.fragment else { panic!("expression fragment in statement position") };
                out.extend(expand_block(t, b, k - alt.weight).into_iter().map(|(x, c)| (x, c + alt.weight)));
            }
            out
        }
        Assign(a, b) => {
            pair(expand_expr(t, a, k), expand_expr(t, b, k), k).into_iter().map(|((a, b), c)| (one(Assign(a, b)), c)).collect()
        }
        AugAssign(a, op, b) => pair(expand_expr(t, a, k), expand_expr(t, b, k), k)
            .into_iter()
            .map(|((a, b), c)| (one(AugAssign(a, *op, b)), c))
            .collect(),
        Expr(e) => expand_expr(t, e, k).into_iter().map(|(e, c)| (one(Expr(e)), c)).collect(),
        Return(e) => expand_expr(t, e, k).into_iter().map(|(e, c)| (one(Return(e)), c)).collect(),
        If(cond, a, b) => {
            let mut out = Vec::new();
            for (cond, c0) in expand_expr(t, cond, k) {
                for ((a, b), c1) in pair(expand_block(t, a, k), expand_block(t, b, k), k - c0) {
                    out.push((one(If(cond.clone(), a, b)), c0 + c1));
                }
            }
            out
        }
        While(cond, b) => {
            pair(expand_expr(t, cond, k), expand_block(t, b, k), k).into_iter().map(|((x, b), c)| (one(While(x, b)), c)).collect()
        }
        For(v, it, b) => pair(expand_expr(t, it, k), expand_block(t, b, k), k)
            .into_iter()
            .map(|((x, b), c)| (one(For(v.clone(), x, b)), c))
            .collect(),
        Pass => vec![(one(Pass), 0)],
    }
}

fn pair<A: Clone, B: Clone>(a: Costed<A>, b: Costed<B>, k: u32) -> Costed<(A, B)> {
    let mut out = Vec::new();
    for (x, c) in &a {
        for (y, d) in b.iter().filter(|(_, d)| c + d <= k) {
            out.push(((x.clone(), y.clone()), c + d));
        }
    }
    out
}

pub fn expand_block(t: &TildeProgram, b: &[Stmt], k: u32) -> Costed<Vec<Stmt>> {
    let parts = b.iter().map(|s| expand_stmt(t, s, k)).collect();
    product(parts, k).into_iter().map(|(chunks, c)| (chunks.concat(), c)).collect()
}

/// The program multiset of `t`: every way of resolving its choices.
pub fn expand_program(t: &TildeProgram) -> Costed<Program> {
    expand_program_upto(t, u32::MAX)
}

/// The part of the program multiset of `t` that costs at most `k`.
pub fn expand_program_upto(t: &TildeProgram, k: u32) -> Costed<Program> {
    let funcs: Vec<Costed<FuncDef>> = t
        .root
        .functions
        .iter()
        .map(|f| expand_block(t, &f.body, k).into_iter().map(|(body, c)| (FuncDef { body, ..f.clone() }, c)).collect())
        .collect();
    product(funcs, k)
        .into_iter()
        .map(|(functions, c)| (Program { functions, entry: t.root.entry, source: t.root.source.clone() }, c))
        .collect()
}

/// Whether `p` agrees with the reference on every input of the oracle.
pub fn agrees(p: &Program, oracle: &ReferenceOracle) -> bool {
    oracle.inputs.iter().zip(&oracle.outputs).all(|(i, o)| matches!(evaluate(p, i, &oracle.bounds), Ok(v) if &v == o))
}

/// Least cost, at most `k`, of a program of `t` that agrees with the
/// reference, found by trying all of them.
pub fn brute_force_min(t: &TildeProgram, oracle: &ReferenceOracle, k: u32) -> Option<u32> {
    expand_program_upto(t, k).into_iter().filter(|(p, _)| agrees(p, oracle)).map(|(_, c)| c).min()
}
