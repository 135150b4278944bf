// SPDX-License-Identifier: Apache-2.0

//! The IMP language: a small, dynamically typed, indentation-based subset of Python.

pub mod ast;
pub mod inputs;
pub mod interp;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod signature;
pub mod value;

pub use ast::{ArithOp, BoolOp, CmpOp, Expr, ExprKind, FuncDef, Program, SiteId, Span, Stmt, StmtKind};
pub use inputs::{enumerate_inputs, input_count, InputState};
pub use interp::{evaluate, Bounds, EvalResult, Fault, FaultKind};
pub use parser::{parse_imp, parse_imp_with};
pub use printer::print_program;
pub use signature::{parse_signature, SemType, Signature, UnknownTypeSuffix};
pub use value::Value;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at line {line}, column {col}: {message}")]
pub struct SyntaxError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}
