// SPDX-License-Identifier: Apache-2.0

use super::syntax::*;

/// A primed subterm that is not smaller than its rule's left-hand side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub rule: String,
    pub primed_size: usize,
    pub lhs_size: usize,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "rule {}: primed subterm of size {} is not smaller than the pattern (size {})",
            self.rule, self.primed_size, self.lhs_size
        )
    }
}

pub fn check_well_formed(model: &ErrorModel) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    for rule in &model.rules {
        let lhs_size = rule.lhs.size();
        let mut sizes = Vec::new();
        match &rule.rhs {
            Template::Expr(e) => primed_expr(e, &mut sizes),
            Template::Stmts(seq) | Template::Func(seq) => seq.iter().for_each(|s| primed_stmt(s, &mut sizes)),
        }
        for primed_size in sizes {
            if primed_size >= lhs_size {
                out.push(Violation { rule: rule.id.clone(), primed_size, lhs_size });
            }
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

fn primed_expr(e: &TExpr, out: &mut Vec<usize>) {
    match e {
        TExpr::Meta { primed: true, .. } => out.push(1),
        TExpr::Primed(inner) => out.push(inner.size()),
        _ => {}
    }
    for c in e.children() {
        primed_expr(c, out);
    }
}

fn primed_stmt(s: &TStmt, out: &mut Vec<usize>) {
    if let TStmt::Meta { primed: true, .. } = s {
        out.push(1);
    }
    s.exprs().iter().for_each(|e| primed_expr(e, out));
    s.blocks().iter().for_each(|b| b.iter().for_each(|s| primed_stmt(s, out)));
}
