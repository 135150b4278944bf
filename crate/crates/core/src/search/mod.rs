// SPDX-License-Identifier: Apache-2.0

//! Cost-ascending, counterexample-guided search for the cheapest candidate
//! that agrees with the reference on every bounded input.

use std::collections::HashMap;
use std::time::Instant;

use rayon::prelude::*;

use crate::imp::ast::*;
use crate::imp::inputs::{enumerate_inputs, input_count, InputState};
use crate::imp::interp::{Bounds, EvalResult, Fault, Machine, NoChoices};
use crate::imp::signature::{parse_signature, Signature, UnknownTypeSuffix};
use crate::imp::value::Value;
use crate::tilde::{Assignment, Fragment, Picks, Selection, SiteForest, TildeProgram};

/// Largest input space the oracle will tabulate.
pub const MAX_INPUTS: u128 = 1 << 22;

/// Which bodies calls to helper functions run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum CalleeMode {
    /// The student's own helpers, falling back to the reference's.
    #[default]
    Student,
    /// Always the reference's helpers.
    Reference,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    /// Largest total cost considered.
    pub max_cost: u32,
    /// Ceiling on the number of candidates screened in one run.
    pub budget_candidates: u64,
    pub budget_seconds: Option<f64>,
    pub callees: CalleeMode,
    /// Candidates screened in parallel between two sequential join points.
    pub batch: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_cost: 5,
            budget_candidates: 10_000_000,
            budget_seconds: None,
            callees: CalleeMode::Student,
            batch: 2048,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error(transparent)]
    Signature(#[from] UnknownTypeSuffix),
    #[error("invalid bounds: {0}")]
    Bounds(String),
    #[error("the input space has {0} inputs, more than the supported {MAX_INPUTS}")]
    TooManyInputs(u128),
    #[error("the reference fails on input {input}: {fault:?}")]
    ReferenceFault { input: String, fault: Fault },
}

/// The reference solution tabulated over the whole bounded input space.
#[derive(Clone, Debug)]
pub struct ReferenceOracle {
    pub program: Program,
    pub signature: Signature,
    pub bounds: Bounds,
    /// In enumeration order.
    pub inputs: Vec<InputState>,
    /// `outputs[i]` is the reference result on `inputs[i]`.
    pub outputs: Vec<Value>,
    /// Reference functions available to candidates, also under their
    /// suffix-free names.
    pub library: Vec<FuncDef>,
    index: HashMap<InputState, usize>,
}

impl ReferenceOracle {
    pub fn new(reference: &Program, bounds: Bounds) -> Result<ReferenceOracle, OracleError> {
        bounds.validate().map_err(OracleError::Bounds)?;
        let signature = parse_signature(reference.entry_fn())?;
        let count = input_count(&signature, &bounds);
        if count > MAX_INPUTS {
            return Err(OracleError::TooManyInputs(count));
        }
        let inputs = enumerate_inputs(&signature, &bounds);
        let results: Vec<EvalResult> = inputs.par_iter().map(|i| crate::imp::interp::evaluate(reference, i, &bounds)).collect();
        let mut outputs = Vec::with_capacity(results.len());
        for (i, r) in results.into_iter().enumerate() {
            match r {
                Ok(v) => outputs.push(v),
                Err(fault) => return Err(OracleError::ReferenceFault { input: show_input(&inputs[i]), fault }),
            }
        }
        let mut library = reference.functions.clone();
        for f in &reference.functions {
            if let Ok(sig) = parse_signature(f) {
                if sig.base_name != f.name && !library.iter().any(|g| g.name == sig.base_name) {
                    library.push(FuncDef { name: sig.base_name.clone(), ..f.clone() });
                }
            }
        }
        let index = inputs.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
        Ok(ReferenceOracle { program: reference.clone(), signature, bounds, inputs, outputs, library, index })
    }

    pub fn input_index(&self, input: &InputState) -> Option<usize> {
        self.index.get(input).copied()
    }

    /// Names a student program may call without defining them.
    pub fn library_names(&self) -> Vec<&str> {
        self.library.iter().map(|f| f.name.as_str()).collect()
    }
}

/// Renders an input as a Python argument list.
pub fn show_input(input: &InputState) -> String {
    let parts: Vec<String> = input.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(", "))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BudgetKind {
    Candidates,
    Timeout,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub candidates_tested: u64,
    pub cexs: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fix {
    pub assignment: Assignment,
    pub cost: u32,
    pub cexs_used: usize,
    pub candidates_tested: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RepairResult {
    AlreadyCorrect,
    Fixed(Fix),
    NoFixWithinK { k: u32, stats: SearchStats },
    Budget { kind: BudgetKind, stats: SearchStats },
}

impl RepairResult {
    pub fn fix(&self) -> Option<&Fix> {
        match self {
            RepairResult::Fixed(f) => Some(f),
            _ => None,
        }
    }

    pub fn stats(&self) -> SearchStats {
        match self {
            RepairResult::AlreadyCorrect => SearchStats::default(),
            RepairResult::Fixed(f) => SearchStats { candidates_tested: f.candidates_tested, cexs: f.cexs_used },
            RepairResult::NoFixWithinK { stats, .. } | RepairResult::Budget { stats, .. } => *stats,
        }
    }
}

fn mismatch(r: &EvalResult, expected: &Value) -> bool {
    !matches!(r, Ok(v) if v == expected)
}

/// The first input, in enumeration order, on which `candidate` differs from
/// the reference. Faults always count as differences.
pub fn find_counterexample(candidate: &Program, oracle: &ReferenceOracle, callees: CalleeMode) -> Option<InputState> {
    counterexample_index(candidate, oracle, callees).map(|i| oracle.inputs[i].clone())
}

pub fn counterexample_index(candidate: &Program, oracle: &ReferenceOracle, callees: CalleeMode) -> Option<usize> {
    let funcs = match callees {
        CalleeMode::Student => &candidate.functions[..],
        CalleeMode::Reference => std::slice::from_ref(candidate.entry_fn()),
    };
    let entry = candidate.entry_fn();
    (0..oracle.inputs.len()).into_par_iter().position_first(|i| {
        let r = Machine::new(funcs, &oracle.library, &NoChoices, &oracle.bounds).call(entry, &oracle.inputs[i], entry.span);
        mismatch(&r, &oracle.outputs[i])
    })
}

/// Evaluates selections of one rewritten program without building them.
struct Evaluator<'t> {
    tilde: &'t TildeProgram,
    oracle: &'t ReferenceOracle,
    funcs: &'t [FuncDef],
    entry: &'t FuncDef,
}

impl<'t> Evaluator<'t> {
    fn new(tilde: &'t TildeProgram, oracle: &'t ReferenceOracle, callees: CalleeMode) -> Self {
        let all = &tilde.root.functions[..];
        let entry = &all[tilde.root.entry];
        let funcs = match callees {
            CalleeMode::Student => all,
            CalleeMode::Reference => std::slice::from_ref(entry),
        };
        Evaluator { tilde, oracle, funcs, entry }
    }

    fn dense(&self, sel: &[(SiteId, u16)]) -> Vec<u16> {
        let mut picks = vec![0; self.tilde.sites.len()];
        for &(s, a) in sel {
            picks[s] = a;
        }
        picks
    }

    fn passes(&self, picks: &[u16], input: usize) -> bool {
        let resolver = Picks { sites: &self.tilde.sites, picks };
        let r = Machine::new(self.funcs, &self.oracle.library, &resolver, &self.oracle.bounds).call(
            self.entry,
            &self.oracle.inputs[input],
            self.entry.span,
        );
        !mismatch(&r, &self.oracle.outputs[input])
    }

    fn passes_all(&self, picks: &[u16], cexs: &[usize]) -> bool {
        cexs.iter().all(|&i| self.passes(picks, i))
    }

    fn first_failure(&self, picks: &[u16]) -> Option<usize> {
        (0..self.oracle.inputs.len()).into_par_iter().position_first(|i| !self.passes(picks, i))
    }
}

/// Alternatives worth selecting: an alternative without nested sites is
/// skipped when an earlier alternative of the same site (or the default),
/// with all its nested sites at their defaults, is the same fragment at no
/// greater weight. Every program it yields is then reachable more cheaply.
pub fn useful_alternatives(tilde: &TildeProgram, callees: CalleeMode) -> SiteForest {
    let zeros = vec![0u16; tilde.sites.len()];
    let live: Option<Vec<bool>> = match callees {
        CalleeMode::Student => None,
        CalleeMode::Reference => {
            let mut v = vec![false; tilde.sites.len()];
            for s in tilde.sites_of_function(tilde.root.entry) {
                v[s] = true;
            }
            Some(v)
        }
    };
    let resolved: Vec<Vec<Fragment>> = tilde
        .sites
        .iter()
        .map(|s| s.alternatives.iter().map(|a| tilde.resolve_fragment(&a.fragment, &zeros)).collect())
        .collect();
    SiteForest::with_allowed(tilde, |site, alt| {
        if live.as_ref().is_some_and(|l| !l[site]) {
            return false;
        }
        let alts = &tilde.sites[site].alternatives;
        let me = &alts[alt as usize];
        if me.fragment.has_choices() {
            return true;
        }
        !(0..alt as usize).any(|y| alts[y].weight <= me.weight && resolved[site][y] == me.fragment)
    })
}

/// The cheapest assignment of cost at most `cost_bound`, not in `blocked`,
/// that agrees with the reference on every input of `cexs`; least in
/// (cost, tie order) among those.
pub fn synth(
    tilde: &TildeProgram,
    cexs: &[InputState],
    oracle: &ReferenceOracle,
    cost_bound: u32,
    blocked: &[Assignment],
    config: &SearchConfig,
) -> Result<Option<Assignment>, BudgetKind> {
    let ev = Evaluator::new(tilde, oracle, config.callees);
    let idx: Vec<usize> =
        cexs.iter().map(|c| oracle.input_index(c).expect("counterexample inside the bounded input space")).collect();
    let forest = SiteForest::new(tilde);
    let blocked: Vec<Assignment> = blocked.iter().map(|a| tilde.canonical(a)).collect();
    let mut tested = 0u64;
    for cost in 0..=cost_bound {
        let mut level = forest.level(cost);
        loop {
            let batch: Vec<Selection> = level.by_ref().take(config.batch.max(1)).collect();
            if batch.is_empty() {
                break;
            }
            let flags: Vec<bool> = batch.par_iter().map(|sel| ev.passes_all(&ev.dense(sel), &idx)).collect();
            for (sel, ok) in batch.into_iter().zip(flags) {
                tested += 1;
                if tested > config.budget_candidates {
                    return Err(BudgetKind::Candidates);
                }
                let a = Assignment::from_pairs(sel);
                if ok && !blocked.contains(&a) {
                    return Ok(Some(a));
                }
            }
        }
    }
    Ok(None)
}

pub fn cegis_min(tilde: &TildeProgram, oracle: &ReferenceOracle, config: &SearchConfig) -> RepairResult {
    Search::new(tilde, oracle, config, &[]).run()
}

/// The next cheapest fix after `prior`: each prior assignment is blocked, and
/// so is every candidate that instantiates to a prior's program.
pub fn next_alternate(prior: &[Fix], tilde: &TildeProgram, oracle: &ReferenceOracle, config: &SearchConfig) -> RepairResult {
    let blocked: Vec<Assignment> = prior.iter().map(|f| f.assignment.clone()).collect();
    Search::new(tilde, oracle, config, &blocked).run()
}

struct Search<'t> {
    ev: Evaluator<'t>,
    config: &'t SearchConfig,
    blocked: Vec<Assignment>,
    blocked_programs: Vec<Program>,
}

impl<'t> Search<'t> {
    fn new(tilde: &'t TildeProgram, oracle: &'t ReferenceOracle, config: &'t SearchConfig, blocked: &[Assignment]) -> Self {
        let blocked: Vec<Assignment> = blocked.iter().map(|a| tilde.canonical(a)).collect();
        let blocked_programs = blocked.iter().filter_map(|a| tilde.instantiate(a).ok()).map(|c| c.program).collect();
        Search { ev: Evaluator::new(tilde, oracle, config.callees), config, blocked, blocked_programs }
    }

    fn is_blocked(&self, sel: &Selection) -> bool {
        if self.blocked.is_empty() {
            return false;
        }
        let a = Assignment::from_pairs(sel.iter().copied());
        if self.blocked.contains(&a) {
            return true;
        }
        match self.ev.tilde.instantiate(&a) {
            Ok(c) => self.blocked_programs.contains(&c.program),
            Err(_) => true,
        }
    }

    fn run(&self) -> RepairResult {
        let start = Instant::now();
        let ev = &self.ev;
        let zeros = vec![0u16; ev.tilde.sites.len()];
        let mut cexs = match ev.first_failure(&zeros) {
            None if self.blocked.is_empty() => return RepairResult::AlreadyCorrect,
            None => Vec::new(),
            Some(i) => vec![i],
        };
        let forest = useful_alternatives(ev.tilde, self.config.callees);
        let mut tested = 0u64;
        let stats = |tested, cexs: &Vec<usize>| SearchStats { candidates_tested: tested, cexs: cexs.len() };
        for cost in 0..=self.config.max_cost {
            let mut level = forest.level(cost);
            loop {
                let batch: Vec<Selection> = level.by_ref().take(self.config.batch.max(1)).collect();
                if batch.is_empty() {
                    break;
                }
                let snapshot = cexs.clone();
                let flags: Vec<bool> = batch.par_iter().map(|sel| ev.passes_all(&ev.dense(sel), &snapshot)).collect();
                for (sel, ok) in batch.iter().zip(flags) {
                    tested += 1;
                    if tested > self.config.budget_candidates {
                        return RepairResult::Budget { kind: BudgetKind::Candidates, stats: stats(tested - 1, &cexs) };
                    }
                    if !ok {
                        continue;
                    }
                    let picks = ev.dense(sel);
                    if !ev.passes_all(&picks, &cexs[snapshot.len()..]) || self.is_blocked(sel) {
                        continue;
                    }
                    match ev.first_failure(&picks) {
                        None => {
                            return RepairResult::Fixed(Fix {
                                assignment: Assignment::from_pairs(sel.iter().copied()),
                                cost,
                                cexs_used: cexs.len(),
                                candidates_tested: tested,
                            })
                        }
                        Some(i) => cexs.push(i),
                    }
                }
                if let Some(limit) = self.config.budget_seconds {
                    if start.elapsed().as_secs_f64() > limit {
                        return RepairResult::Budget { kind: BudgetKind::Timeout, stats: stats(tested, &cexs) };
                    }
                }
            }
        }
        RepairResult::NoFixWithinK { k: self.config.max_cost, stats: stats(tested, &cexs) }
    }
}
