// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use super::ast::FuncDef;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SemType {
    Int,
    Bool,
    ListInt,
    TupleInt,
}

impl SemType {
    // Longest suffix first so that `_list_int` is not read as `_int`.
    const SUFFIXES: [(&'static str, SemType); 4] =
        [("_list_int", SemType::ListInt), ("_tuple_int", SemType::TupleInt), ("_bool", SemType::Bool), ("_int", SemType::Int)];

    pub fn name(self) -> &'static str {
        match self {
            SemType::Int => "int",
            SemType::Bool => "bool",
            SemType::ListInt => "list_int",
            SemType::TupleInt => "tuple_int",
        }
    }
}

impl fmt::Display for SemType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub base_name: String,
    pub params: Vec<(String, SemType)>,
    pub ret: SemType,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unknown type suffix in '{name}'")]
pub struct UnknownTypeSuffix {
    pub name: String,
}

/// Splits `computeDeriv_list_int` into `("computeDeriv", ListInt)`.
pub fn split_suffix(name: &str) -> Result<(&str, SemType), UnknownTypeSuffix> {
    for (suffix, ty) in SemType::SUFFIXES {
        if let Some(base) = name.strip_suffix(suffix) {
            if !base.is_empty() {
                return Ok((base, ty));
            }
        }
    }
    Err(UnknownTypeSuffix { name: name.to_string() })
}

pub fn parse_signature(decl: &FuncDef) -> Result<Signature, UnknownTypeSuffix> {
    let (base, ret) = split_suffix(&decl.name)?;
    let params = decl.params.iter().map(|p| split_suffix(p).map(|(b, t)| (b.to_string(), t))).collect::<Result<_, _>>()?;
    Ok(Signature { base_name: base.to_string(), params, ret })
}
