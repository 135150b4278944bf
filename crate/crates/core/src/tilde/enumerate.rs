// SPDX-License-Identifier: Apache-2.0

use super::{Assignment, TildeProgram};
use crate::imp::ast::SiteId;

/// Non-default selections in descending site order. Within one cost level
/// the enumeration emits selections in ascending lexicographic order of
/// this sequence.
pub type Selection = Vec<(SiteId, u16)>;

/// The shape of a program's choice sites, stripped of the fragments:
/// enough to enumerate canonical selections.
#[derive(Clone, Debug)]
pub struct SiteForest {
    weights: Vec<Vec<u32>>,
    /// Non-default alternatives that may be selected, ascending.
    allowed: Vec<Vec<u16>>,
    parent: Vec<Option<(SiteId, u16)>>,
}

impl SiteForest {
    pub fn new(tilde: &TildeProgram) -> SiteForest {
        SiteForest::with_allowed(tilde, |_, _| true)
    }

    /// Only alternatives for which `keep(site, alt)` holds may be selected.
    pub fn with_allowed(tilde: &TildeProgram, keep: impl Fn(SiteId, u16) -> bool) -> SiteForest {
        let weights = tilde.sites.iter().map(|s| s.alternatives.iter().map(|a| a.weight).collect()).collect();
        let allowed = tilde.sites.iter().map(|s| (1..s.alternatives.len() as u16).filter(|&a| keep(s.id, a)).collect()).collect();
        let parent = tilde.sites.iter().map(|s| s.parent).collect();
        SiteForest { weights, allowed, parent }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Upper bound on the cost of any selection.
    pub fn max_total(&self) -> u32 {
        self.weights
            .iter()
            .zip(&self.allowed)
            .map(|(w, al)| al.iter().map(|&a| w[a as usize]).max().unwrap_or(0))
            .fold(0u32, |acc, w| acc.saturating_add(w))
    }

    pub fn weight(&self, site: SiteId, alt: u16) -> u32 {
        self.weights[site][alt as usize]
    }

    pub fn allowed(&self, site: SiteId) -> &[u16] {
        &self.allowed[site]
    }

    /// Every canonical selection of exactly `cost`, in tie order.
    pub fn level(&self, cost: u32) -> Level<'_> {
        let root = Frame { hi: self.len(), t: 0, alt: 0, remaining: cost, req: Vec::new(), forbid: Vec::new() };
        Level { forest: self, stack: vec![root], picks: Vec::new(), zero: cost == 0 }
    }

    /// Number of canonical selections of cost at most `max_cost`.
    pub fn count(&self, max_cost: u32) -> u64 {
        (0..=max_cost.min(self.max_total())).map(|c| self.level(c).count() as u64).sum()
    }

    /// Adds the constraints implied by selecting `(t, a)`; `false` on conflict.
    fn constrain(&self, t: SiteId, a: u16, req: &mut Vec<(SiteId, u16)>, forbid: &mut Vec<SiteId>) -> bool {
        if forbid.contains(&t) {
            return false;
        }
        if let Some(i) = req.iter().position(|r| r.0 == t) {
            if req[i].1 != a {
                return false;
            }
            req.swap_remove(i);
        }
        let mut cur = t;
        while let Some((p, y)) = self.parent[cur] {
            if y > 0 {
                if forbid.contains(&p) {
                    return false;
                }
                match req.iter().find(|r| r.0 == p) {
                    Some(r) if r.1 != y => return false,
                    Some(_) => {}
                    None => req.push((p, y)),
                }
                return true;
            }
            if req.iter().any(|r| r.0 == p) {
                return false;
            }
            if !forbid.contains(&p) {
                forbid.push(p);
            }
            cur = p;
        }
        true
    }
}

struct Frame {
    /// Next pick must be below this site.
    hi: usize,
    t: usize,
    /// Position in `allowed[t]`.
    alt: usize,
    remaining: u32,
    req: Vec<(SiteId, u16)>,
    forbid: Vec<SiteId>,
}

/// Lazy stream of the selections of one exact cost.
pub struct Level<'f> {
    forest: &'f SiteForest,
    stack: Vec<Frame>,
    /// One entry per frame above the root.
    picks: Selection,
    zero: bool,
}

impl Iterator for Level<'_> {
    type Item = Selection;

    fn next(&mut self) -> Option<Selection> {
        if self.zero {
            self.zero = false;
            self.stack.clear();
            return Some(Vec::new());
        }
        let f = self.forest;
        loop {
            let top = self.stack.last_mut()?;
            if top.t >= top.hi {
                self.stack.pop();
                self.picks.pop();
                continue;
            }
            let t = top.t;
            let allowed = &f.allowed[t];
            if top.alt >= allowed.len() {
                top.t += 1;
                top.alt = 0;
                continue;
            }
            let a = allowed[top.alt];
            top.alt += 1;
            let w = f.weights[t][a as usize];
            if w > top.remaining {
                continue;
            }
            let mut req = top.req.clone();
            let mut forbid = top.forbid.clone();
            if !f.constrain(t, a, &mut req, &mut forbid) {
                continue;
            }
            let remaining = top.remaining - w;
            if remaining == 0 {
                if req.is_empty() {
                    let mut out = self.picks.clone();
                    out.push((t, a));
                    return Some(out);
                }
                continue;
            }
            let lo = req.iter().map(|r| r.0).max().unwrap_or(0);
            self.picks.push((t, a));
            self.stack.push(Frame { hi: t, t: lo, alt: 0, remaining, req, forbid });
        }
    }
}

/// All canonical assignments of cost at most `max_cost`, cost-ascending.
pub struct CandidateStream<'f> {
    forest: &'f SiteForest,
    max_cost: u32,
    cost: u32,
    level: Level<'f>,
}

impl Iterator for CandidateStream<'_> {
    type Item = (Assignment, u32);

    fn next(&mut self) -> Option<(Assignment, u32)> {
        loop {
            if let Some(sel) = self.level.next() {
                return Some((Assignment::from_pairs(sel), self.cost));
            }
            if self.cost >= self.max_cost || self.cost >= self.forest.max_total() {
                return None;
            }
            self.cost += 1;
            self.level = self.forest.level(self.cost);
        }
    }
}

impl SiteForest {
    pub fn stream(&self, max_cost: u32) -> CandidateStream<'_> {
        CandidateStream { forest: self, max_cost, cost: 0, level: self.level(0) }
    }
}

/// Every canonical assignment of `tilde` with cost at most `max_cost`,
/// in non-decreasing cost.
pub fn enumerate_candidates(tilde: &TildeProgram, max_cost: u32) -> Vec<(Assignment, u32)> {
    SiteForest::new(tilde).stream(max_cost).collect()
}
