//! Bounded search for primitive positive formulas and cross-prevention checks.
//!
//! The search fixes a variable set (free variables first), computes for
//! every candidate atom the set of weak orders of all variables that
//! satisfy it, and runs a depth-first search over conjunctions in a fixed
//! atom order. Projections onto the free variables only shrink as atoms are
//! added, which gives the pruning rule.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::positional_names;
use crate::ops::{
    has_constant_polymorphism, preserves, preserves_structure, structure_preserved_by_all_permutations,
    preserved_by_all_permutations, OpKind, OpSpec,
};
use crate::order::{enumerate_weak_orders, WeakOrder};
use crate::pp::{Atom, PPFormula};
use crate::relation::{builtin, TemporalRelation};
use crate::solvers::oracle::first_model;
use crate::structure::{Caps, TemporalStructure};

/// Default limits of [`bounded_ppdef_search`].
pub const DEFAULT_MAX_BOUND: usize = 2;
pub const DEFAULT_MAX_ATOMS: usize = 4;
/// Largest number of variables (free plus bound) the search considers.
pub const MAX_SEARCH_VARS: usize = 6;
/// Search nodes visited before giving up.
pub const DEFAULT_NODE_BUDGET: u64 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum SearchOutcome {
    Found { formula: PPFormula },
    /// Nothing within the bounds. `certificate` names a polymorphism of
    /// the structure that violates the target, which proves that no
    /// definition exists at any bound; `budget_exhausted` reports that the
    /// node budget ran out before the bounds were covered.
    NotFound {
        certificate: Option<String>,
        budget_exhausted: bool,
    },
}

impl SearchOutcome {
    pub fn formula(&self) -> Option<&PPFormula> {
        match self {
            SearchOutcome::Found { formula } => Some(formula),
            SearchOutcome::NotFound { .. } => None,
        }
    }
}

/// Variable names: `x, y, z, u, v, w`, then `h1, h2, ...`; for more than
/// six free variables, `x1..xk` followed by `h1, ...`.
pub(crate) fn variable_names(free: usize, bound: usize) -> Vec<String> {
    const LETTERS: [&str; 6] = ["x", "y", "z", "u", "v", "w"];
    let mut out: Vec<String> = if free <= 4 {
        LETTERS[..free].iter().map(|s| s.to_string()).collect()
    } else {
        positional_names(free)
    };
    let mut next_letter = if free <= 4 { free } else { LETTERS.len() };
    let mut h = 0;
    for _ in 0..bound {
        if next_letter < LETTERS.len() {
            out.push(LETTERS[next_letter].to_string());
            next_letter += 1;
        } else {
            h += 1;
            out.push(format!("h{h}"));
        }
    }
    out
}

/// A polymorphism of `a` that does not preserve `target`, if one of the
/// implemented checks finds it.
pub fn non_definability_certificate(a: &TemporalStructure, target: &TemporalRelation) -> Option<String> {
    if has_constant_polymorphism(a) && !target.is_empty() && !target.contains_constant() {
        return Some("constant".into());
    }
    if structure_preserved_by_all_permutations(a) && !preserved_by_all_permutations(target) {
        return Some("all permutations".into());
    }
    let kinds = [
        OpKind::Min,
        OpKind::Mi,
        OpKind::Mx,
        OpKind::Mix,
        OpKind::Ll,
        OpKind::Lex,
        OpKind::Pp,
    ];
    for kind in kinds {
        for dual in [false, true] {
            let op = OpSpec { kind, dual };
            if !preserves(op, target) && preserves_structure(op, a) {
                return Some(op.to_string());
            }
        }
    }
    None
}

struct Candidates {
    atoms: Vec<Atom>,
    sets: Vec<FixedBitSet>,
    /// Free-variable orbit index of every orbit of all variables.
    proj: Vec<usize>,
    free_orbits: usize,
}

fn candidates(a: &TemporalStructure, free: usize, total: usize) -> Result<Candidates> {
    let universe = enumerate_weak_orders(total)?;
    let free_list = enumerate_weak_orders(free)?;
    let prefix: Vec<usize> = (0..free).collect();
    let proj = universe
        .iter()
        .map(|w| {
            free_list
                .binary_search(&w.project(&prefix))
                .expect("projection of a weak order is a weak order")
        })
        .collect();
    let eq = builtin("=")?;
    let mut rels: Vec<(&str, &TemporalRelation)> = a
        .relations()
        .iter()
        .map(|(s, r)| (s.as_str(), r))
        .filter(|(_, r)| r.arity() <= total)
        .collect();
    rels.push(("=", &eq));
    let mut atoms = Vec::new();
    let mut sets: Vec<FixedBitSet> = Vec::new();
    for (sym, rel) in rels {
        let k = rel.arity();
        for code in 0..total.pow(k as u32) {
            // argument tuples in lexicographic order
            let args: Vec<usize> = (0..k).rev().map(|i| code / total.pow(i as u32) % total).collect();
            let mut set = FixedBitSet::with_capacity(universe.len());
            for (i, w) in universe.iter().enumerate() {
                if rel.contains(&w.project(&args)) {
                    set.insert(i);
                }
            }
            let trivial = set.count_ones(..) == universe.len();
            if !trivial && !sets.contains(&set) {
                atoms.push(Atom::new(sym, args));
                sets.push(set);
            }
        }
    }
    Ok(Candidates {
        atoms,
        sets,
        proj,
        free_orbits: free_list.len(),
    })
}

struct Dfs<'a> {
    cands: &'a Candidates,
    viable: &'a dyn Fn(&FixedBitSet) -> bool,
    accept: &'a dyn Fn(&FixedBitSet) -> bool,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl Dfs<'_> {
    fn project(&self, s: &FixedBitSet) -> FixedBitSet {
        let mut p = FixedBitSet::with_capacity(self.cands.free_orbits);
        for i in s.ones() {
            p.insert(self.cands.proj[i]);
        }
        p
    }

    fn run(&mut self, start: usize, depth: usize, s: &FixedBitSet, chosen: &mut Vec<usize>) -> bool {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return false;
        }
        let p = self.project(s);
        if !(self.viable)(&p) {
            return false;
        }
        if depth == 0 {
            return (self.accept)(&p);
        }
        for i in start..self.cands.atoms.len() {
            let mut next = s.clone();
            next.intersect_with(&self.cands.sets[i]);
            if next == *s {
                continue;
            }
            chosen.push(i);
            if self.run(i + 1, depth - 1, &next, chosen) {
                return true;
            }
            chosen.pop();
            if self.exhausted {
                return false;
            }
        }
        false
    }
}

/// Iterative deepening over (bound variables, atoms). Returns the first
/// conjunction whose projection is accepted, or whether the budget ran out.
fn search(
    a: &TemporalStructure,
    free: usize,
    max_bound: usize,
    max_atoms: usize,
    budget: u64,
    viable: &dyn Fn(&FixedBitSet) -> bool,
    accept: &dyn Fn(&FixedBitSet) -> bool,
) -> Result<std::result::Result<PPFormula, bool>> {
    let mut exhausted = false;
    for bound in 0..=max_bound {
        let total = free + bound;
        if total > MAX_SEARCH_VARS {
            break;
        }
        let cands = candidates(a, free, total)?;
        let mut full = FixedBitSet::with_capacity(cands.proj.len());
        full.insert_range(..);
        for atoms in 0..=max_atoms {
            if bound > 0 && atoms == 0 {
                continue;
            }
            let mut dfs = Dfs {
                cands: &cands,
                viable,
                accept,
                nodes: 0,
                budget,
                exhausted: false,
            };
            let mut chosen = Vec::new();
            if dfs.run(0, atoms, &full, &mut chosen) {
                let atoms = chosen.iter().map(|&i| cands.atoms[i].clone()).collect();
                return Ok(Ok(PPFormula::new(variable_names(free, bound), free, atoms)?));
            }
            exhausted |= dfs.exhausted;
        }
    }
    Ok(Err(exhausted))
}

/// Searches for a pp-definition of `target` over `a` with at most
/// `max_bound` quantified variables and `max_atoms` atoms. A result of
/// not-found without a certificate does not show non-definability.
pub fn bounded_ppdef_search(
    a: &TemporalStructure,
    target: &TemporalRelation,
    max_bound: usize,
    max_atoms: usize,
) -> Result<SearchOutcome> {
    bounded_ppdef_search_with_budget(a, target, max_bound, max_atoms, DEFAULT_NODE_BUDGET)
}

pub fn bounded_ppdef_search_with_budget(
    a: &TemporalStructure,
    target: &TemporalRelation,
    max_bound: usize,
    max_atoms: usize,
    budget: u64,
) -> Result<SearchOutcome> {
    if let Some(cert) = non_definability_certificate(a, target) {
        return Ok(SearchOutcome::NotFound {
            certificate: Some(cert),
            budget_exhausted: false,
        });
    }
    let k = target.arity();
    let free_list = enumerate_weak_orders(k)?;
    let mut want = FixedBitSet::with_capacity(free_list.len());
    for (i, w) in free_list.iter().enumerate() {
        if target.contains(w) {
            want.insert(i);
        }
    }
    let viable = |p: &FixedBitSet| want.is_subset(p);
    let accept = |p: &FixedBitSet| *p == want;
    Ok(match search(a, k, max_bound, max_atoms, budget, &viable, &accept)? {
        Ok(formula) => SearchOutcome::Found { formula },
        Err(budget_exhausted) => SearchOutcome::NotFound {
            certificate: None,
            budget_exhausted,
        },
    })
}

/// Outcome of the three satisfiability tests of cross prevention for a
/// formula with free variables `(x, y, u, v)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossPreventionReport {
    /// `φ ∧ x=y ∧ u≠v ∧ x≠u ∧ x≠v` is satisfiable.
    pub separates_first: bool,
    /// `φ ∧ x≠y ∧ u=v ∧ x≠u ∧ y≠u` is satisfiable.
    pub separates_second: bool,
    /// `φ ∧ x=y ∧ u=v` is unsatisfiable.
    pub forbids_both: bool,
}

impl CrossPreventionReport {
    pub fn holds(&self) -> bool {
        self.separates_first && self.separates_second && self.forbids_both
    }
}

/// Free-variable orbit predicates of the three conditions.
fn cross_conditions(w: &WeakOrder) -> (bool, bool, bool) {
    let r = w.ranks();
    let (x, y, u, v) = (r[0], r[1], r[2], r[3]);
    (
        x == y && u != v && x != u && x != v,
        x != y && u == v && x != u && y != u,
        x == y && u == v,
    )
}

/// Checks whether `phi` (free variables `x, y, u, v` in that order) is a
/// cross prevention formula over `a`.
pub fn check_cross_prevention(a: &TemporalStructure, phi: &PPFormula) -> Result<CrossPreventionReport> {
    if phi.free_count() != 4 {
        return Err(Error::Contract("a cross prevention formula has exactly four free variables".into()));
    }
    let caps = Caps::default();
    if phi.vars().len() > caps.pp_vars {
        return Err(Error::Resource {
            what: "pp-formula variables",
            got: phi.vars().len(),
            cap: caps.pp_vars,
        });
    }
    let eq = builtin("=")?;
    let neq = builtin("!=")?;
    let mut base = Vec::new();
    for atom in phi.atoms() {
        let rel = a.lookup(&atom.symbol)?;
        if rel.arity() != atom.args.len() {
            return Err(Error::Signature(format!("`{}` applied to the wrong number of arguments", atom.symbol)));
        }
        base.push((atom.args.clone(), rel));
    }
    let n = phi.vars().len();
    let sat = |extra: &[(usize, usize, bool)]| -> Result<bool> {
        let mut cons = base.clone();
        for &(p, q, equal) in extra {
            cons.push((vec![p, q], if equal { &eq } else { &neq }));
        }
        Ok(first_model(n, &cons)?.is_some())
    };
    let (x, y, u, v) = (0, 1, 2, 3);
    Ok(CrossPreventionReport {
        separates_first: sat(&[(x, y, true), (u, v, false), (x, u, false), (x, v, false)])?,
        separates_second: sat(&[(x, y, false), (u, v, true), (x, u, false), (y, u, false)])?,
        forbids_both: !sat(&[(x, y, true), (u, v, true)])?,
    })
}

/// Bounded search for a cross prevention formula over `a`.
pub fn search_cross_prevention(a: &TemporalStructure, max_bound: usize, max_atoms: usize) -> Result<Option<PPFormula>> {
    let free_list = enumerate_weak_orders(4)?;
    let conds: Vec<(bool, bool, bool)> = free_list.iter().map(cross_conditions).collect();
    let has = |p: &FixedBitSet, which: usize| {
        p.ones().any(|i| match which {
            0 => conds[i].0,
            1 => conds[i].1,
            _ => conds[i].2,
        })
    };
    let viable = |p: &FixedBitSet| has(p, 0) && has(p, 1);
    let accept = |p: &FixedBitSet| !has(p, 2);
    Ok(search(a, 4, max_bound, max_atoms, DEFAULT_NODE_BUDGET, &viable, &accept)?.ok())
}
