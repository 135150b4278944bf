// SPDX-License-Identifier: Apache-2.0

//! Error models: correction rules from student-mistake patterns to sets of
//! candidate fixes, and the rewrite that applies them to a program.

mod matching;
mod parser;
mod rewrite;
mod syntax;
mod wellformed;

pub use matching::{apply_expr, apply_stmt, match_expr, match_pattern, match_stmt, Binding, Node, Substitution};
pub use parser::parse_eml;
pub use rewrite::{fold_literals, rewrite, rewrite_with_stats, variants, variants_seq, RewriteStats, MAX_SITES};
pub use syntax::*;
pub use wellformed::{check_well_formed, Violation};

use crate::imp::SyntaxError;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EmlError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("duplicate rule id '{0}'")]
    DuplicateRuleId(String),
    #[error("ill-formed error model: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    IllFormedModel(Vec<Violation>),
    #[error("rule {rule}: {message}")]
    BadTemplate { rule: String, message: String },
    #[error("{0}")]
    RewriteLimit(String),
}
