// SPDX-License-Identifier: Apache-2.0

//! Minimal-correction feedback for introductory programming exercises.
//!
//! A student submission is rewritten under an error model into a program
//! with choice sites, then searched cost-first for the cheapest variant
//! that agrees with a reference solution on every bounded input.

pub mod eml;
pub mod feedback;
pub mod imp;
pub mod search;
pub mod tilde;
