// SPDX-License-Identifier: Apache-2.0

//! Programs with choice sites, each one a weighted set of IMP programs.

mod dump;
mod enumerate;

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::eml::ErrorModel;
use crate::imp::ast::*;
use crate::imp::interp::Resolver;

pub use dump::dump_tilde;
pub use enumerate::{enumerate_candidates, CandidateStream, Selection, SiteForest};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Fragment {
    Expr(Expr),
    Block(Vec<Stmt>),
}

impl Fragment {
    /// Whether any choice node occurs in the fragment.
    pub fn has_choices(&self) -> bool {
        match self {
            Fragment::Expr(e) => expr_has_choice(e),
            Fragment::Block(b) => block_has_choice(b),
        }
    }
}

fn expr_has_choice(e: &Expr) -> bool {
    matches!(e.kind, ExprKind::Choice(_)) || e.children().into_iter().any(expr_has_choice)
}

fn block_has_choice(b: &[Stmt]) -> bool {
    let mut found = false;
    for_each_site_ref(b, &mut |_| found = true);
    found
}

/// Calls `f` on every choice node directly in `b` (not inside alternatives).
fn for_each_site_ref(b: &[Stmt], f: &mut dyn FnMut(SiteId)) {
    fn expr(e: &Expr, f: &mut dyn FnMut(SiteId)) {
        if let ExprKind::Choice(s) = e.kind {
            f(s);
        }
        e.children().into_iter().for_each(|c| expr(c, f));
    }
    for s in b {
        match &s.kind {
            StmtKind::Choice(site) => f(*site),
            StmtKind::Assign(t, e) | StmtKind::AugAssign(t, _, e) => {
                expr(t, f);
                expr(e, f);
            }
            StmtKind::Expr(e) | StmtKind::Return(e) => expr(e, f),
            StmtKind::If(c, t, e) => {
                expr(c, f);
                for_each_site_ref(t, f);
                for_each_site_ref(e, f);
            }
            StmtKind::While(c, body) | StmtKind::For(_, c, body) => {
                expr(c, f);
                for_each_site_ref(body, f);
            }
            StmtKind::Pass => {}
        }
    }
}

#[derive(Clone, Debug)]
pub struct Alternative {
    pub fragment: Fragment,
    /// `None` for the default alternative.
    pub rule: Option<String>,
    pub weight: u32,
}

#[derive(Clone, Debug)]
pub struct ChoiceSite {
    pub id: SiteId,
    pub span: Span,
    /// Index 0 is the default.
    pub alternatives: Vec<Alternative>,
    /// Innermost enclosing site and the alternative of it that contains this one.
    pub parent: Option<(SiteId, u16)>,
    /// Created by a template form (`?x`, `~cop`, `{d | ...}`) rather than by
    /// a rule matching a node of the original program.
    pub synthetic: bool,
}

#[derive(Clone, Debug)]
pub struct TildeProgram {
    pub root: Program,
    pub sites: Vec<ChoiceSite>,
    pub original: Program,
    pub model: Arc<ErrorModel>,
}

/// Selected alternative per site; absent sites use the default.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(pub BTreeMap<SiteId, u16>);

impl Assignment {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (SiteId, u16)>) -> Assignment {
        Assignment(pairs.into_iter().filter(|&(_, a)| a != 0).collect())
    }

    pub fn get(&self, site: SiteId) -> u16 {
        self.0.get(&site).copied().unwrap_or(0)
    }

    pub fn dense(&self, sites: usize) -> Vec<u16> {
        let mut v = vec![0; sites];
        for (&s, &a) in &self.0 {
            if s < sites {
                v[s] = a;
            }
        }
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedCandidate {
    pub program: Program,
    pub cost: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("site {site} has no alternative {index}")]
pub struct BadIndex {
    pub site: SiteId,
    pub index: u16,
}

pub fn default_assignment(_tilde: &TildeProgram) -> Assignment {
    Assignment::default()
}

/// A dense selection vector viewed as a [`Resolver`], for evaluating a
/// candidate without building it.
pub struct Picks<'a> {
    pub sites: &'a [ChoiceSite],
    pub picks: &'a [u16],
}

impl Resolver for Picks<'_> {
    fn expr(&self, site: SiteId) -> &Expr {
        match &self.sites[site].alternatives[self.picks[site] as usize].fragment {
            Fragment::Expr(e) => e,
            Fragment::Block(_) => unreachable!("block fragment at expression site"),
        }
    }

    fn block(&self, site: SiteId) -> &[Stmt] {
        match &self.sites[site].alternatives[self.picks[site] as usize].fragment {
            Fragment::Block(b) => b,
            Fragment::Expr(_) => unreachable!("expression fragment at statement site"),
        }
    }
}

impl TildeProgram {
    pub fn site_count(&self) -> usize {
        self.sites.len()
    }

    /// Whether `site` lies inside the selected alternative of every enclosing site.
    pub fn is_active(&self, site: SiteId, picks: &[u16]) -> bool {
        let mut cur = site;
        while let Some((p, alt)) = self.sites[cur].parent {
            if picks.get(p).copied().unwrap_or(0) != alt {
                return false;
            }
            cur = p;
        }
        true
    }

    /// The active non-default selections of `a`, the canonical form.
    pub fn canonical(&self, a: &Assignment) -> Assignment {
        let dense = a.dense(self.sites.len());
        Assignment(
            a.0.iter()
                .filter(|&(&s, &alt)| alt != 0 && s < self.sites.len() && self.is_active(s, &dense))
                .map(|(&s, &alt)| (s, alt))
                .collect(),
        )
    }

    pub fn check(&self, a: &Assignment) -> Result<(), BadIndex> {
        for (&site, &index) in &a.0 {
            if site >= self.sites.len() || index as usize >= self.sites[site].alternatives.len() {
                return Err(BadIndex { site, index });
            }
        }
        Ok(())
    }

    pub fn cost(&self, a: &Assignment) -> u32 {
        self.canonical(a).0.iter().map(|(&s, &alt)| self.sites[s].alternatives[alt as usize].weight).sum()
    }

    pub fn instantiate(&self, a: &Assignment) -> Result<WeightedCandidate, BadIndex> {
        self.check(a)?;
        let picks = a.dense(self.sites.len());
        let functions =
            self.root.functions.iter().map(|f| FuncDef { body: self.resolve_block(&f.body, &picks), ..f.clone() }).collect();
        let program = Program { functions, entry: self.root.entry, source: self.root.source.clone() };
        Ok(WeightedCandidate { program, cost: self.cost(a) })
    }

    pub fn resolve_fragment(&self, f: &Fragment, picks: &[u16]) -> Fragment {
        match f {
            Fragment::Expr(e) => Fragment::Expr(self.resolve_expr(e, picks)),
            Fragment::Block(b) => Fragment::Block(self.resolve_block(b, picks)),
        }
    }

    /// Replaces every choice node under `e` by its selected alternative.
    pub fn resolve_expr(&self, e: &Expr, picks: &[u16]) -> Expr {
        if let ExprKind::Choice(site) = e.kind {
            let alt = &self.sites[site].alternatives[picks[site] as usize];
            let Fragment::Expr(inner) = &alt.fragment else { unreachable!() };
            return self.resolve_expr(inner, picks);
        }
        let mut out = e.clone();
        self.resolve_expr_children(&mut out, picks);
        out
    }

    fn resolve_expr_children(&self, e: &mut Expr, picks: &[u16]) {
        for c in e.children_mut() {
            if matches!(c.kind, ExprKind::Choice(_)) {
                *c = self.resolve_expr(c, picks);
            } else {
                self.resolve_expr_children(c, picks);
            }
        }
    }

    pub fn resolve_block(&self, b: &[Stmt], picks: &[u16]) -> Vec<Stmt> {
        let mut out = Vec::with_capacity(b.len());
        for s in b {
            if let StmtKind::Choice(site) = s.kind {
                let alt = &self.sites[site].alternatives[picks[site] as usize];
                let Fragment::Block(inner) = &alt.fragment else { unreachable!() };
                out.extend(self.resolve_block(inner, picks));
                continue;
            }
            let r = |e: &Expr| self.resolve_expr(e, picks);
            let kind = match &s.kind {
                StmtKind::Assign(t, e) => StmtKind::Assign(r(t), r(e)),
                StmtKind::AugAssign(t, op, e) => StmtKind::AugAssign(r(t), *op, r(e)),
                StmtKind::Expr(e) => StmtKind::Expr(r(e)),
                StmtKind::Return(e) => StmtKind::Return(r(e)),
                StmtKind::If(c, t, f) => StmtKind::If(r(c), self.resolve_block(t, picks), self.resolve_block(f, picks)),
                StmtKind::While(c, b) => StmtKind::While(r(c), self.resolve_block(b, picks)),
                StmtKind::For(v, it, b) => StmtKind::For(v.clone(), r(it), self.resolve_block(b, picks)),
                StmtKind::Pass => StmtKind::Pass,
                StmtKind::Choice(_) => unreachable!(),
            };
            out.push(Stmt::new(kind, s.span));
        }
        out
    }

    /// Every site in function `f`, including those nested in alternatives.
    pub fn sites_of_function(&self, f: usize) -> Vec<SiteId> {
        let mut out = Vec::new();
        let mut todo = Vec::new();
        for_each_site_ref(&self.root.functions[f].body, &mut |s| todo.push(s));
        while let Some(s) = todo.pop() {
            out.push(s);
            for alt in &self.sites[s].alternatives {
                match &alt.fragment {
                    Fragment::Block(b) => for_each_site_ref(b, &mut |x| todo.push(x)),
                    Fragment::Expr(e) => {
                        let wrapped = [Stmt::new(StmtKind::Expr(e.clone()), e.span)];
                        for_each_site_ref(&wrapped, &mut |x| todo.push(x));
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// The site's default alternative with every nested site at its default.
    pub fn default_fragment(&self, site: SiteId) -> Fragment {
        let zeros = vec![0; self.sites.len()];
        self.resolve_fragment(&self.sites[site].alternatives[0].fragment, &zeros)
    }
}
