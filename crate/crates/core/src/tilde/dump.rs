// SPDX-License-Identifier: Apache-2.0

use super::{Fragment, TildeProgram};
use crate::imp::ast::SiteId;
use crate::imp::printer::{pad, print_program_with, write_block, write_expr, ChoicePrinter, PREC_COND};

struct Braces<'t>(&'t TildeProgram);

impl Braces<'_> {
    fn label(&self, site: SiteId, alt: usize) -> String {
        match &self.0.sites[site].alternatives[alt].rule {
            Some(r) => format!("@{r}"),
            None => String::new(),
        }
    }
}

impl ChoicePrinter for Braces<'_> {
    fn expr_choice(&self, out: &mut String, site: SiteId, _: u8) {
        out.push('{');
        for (i, alt) in self.0.sites[site].alternatives.iter().enumerate() {
            out.push_str(match i {
                0 => "",
                1 => " | ",
                _ => ", ",
            });
            if let Fragment::Expr(e) = &alt.fragment {
                write_expr(out, e, PREC_COND, self);
            }
            out.push_str(&self.label(site, i));
        }
        out.push('}');
    }

    fn block_choice(&self, out: &mut String, site: SiteId, indent: usize) {
        pad(out, indent);
        out.push_str("{\n");
        for (i, alt) in self.0.sites[site].alternatives.iter().enumerate() {
            if i > 0 {
                pad(out, indent);
                out.push_str(&format!("| {}\n", self.label(site, i)));
            }
            if let Fragment::Block(b) = &alt.fragment {
                write_block(out, b, indent + 4, self);
            }
        }
        pad(out, indent);
        out.push_str("}\n");
    }
}

/// The rewritten program with every site shown as `{default | alt@rule, ...}`.
pub fn dump_tilde(tilde: &TildeProgram) -> String {
    print_program_with(&tilde.root, &Braces(tilde))
}
