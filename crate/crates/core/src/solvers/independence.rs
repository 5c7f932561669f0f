//! Randomized search for instances showing that `≠` is not independent
//! from the theory of a temporal structure: a conjunction `φ` and pairs
//! `(xi, yi)` such that each `φ ∧ xi ≠ yi` is satisfiable but
//! `φ ∧ ⋀ xi ≠ yi` is not.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::instance::{Constraint, Instance};
use super::oracle::first_model;
use crate::error::Result;
use crate::ops::{preserves_structure, OpSpec};
use crate::relation::{builtin, TemporalRelation};
use crate::structure::TemporalStructure;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndependenceCounterexample {
    pub vars: Vec<String>,
    pub constraints: Vec<Constraint>,
    pub pairs: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum IndependenceReport {
    /// The structure has a binary injective polymorphism (ll or its dual),
    /// so `≠` is independent and no search is needed.
    Certified { op: String },
    /// No counterexample among the sampled instances; not a proof.
    NoneFound { trials: usize },
    Counterexample(IndependenceCounterexample),
}

/// Whether `φ` with the listed disequalities is satisfiable.
fn sat_with(n: usize, base: &[(Vec<usize>, &TemporalRelation)], neq: &TemporalRelation, pairs: &[(usize, usize)]) -> Result<bool> {
    let mut cons = base.to_vec();
    cons.extend(pairs.iter().map(|&(a, b)| (vec![a, b], neq)));
    Ok(first_model(n, &cons)?.is_some())
}

/// Searches `trials` random instances with at most `max_vars` variables.
/// For each satisfiable instance, every pair of individually satisfiable
/// disequalities is tested, then all of them together. Results are a
/// deterministic function of `seed`.
pub fn independence_falsifier(a: &TemporalStructure, trials: usize, max_vars: usize, seed: u64) -> Result<IndependenceReport> {
    for op in [OpSpec::LL, OpSpec::LL.dual()] {
        if preserves_structure(op, a) {
            return Ok(IndependenceReport::Certified { op: op.to_string() });
        }
    }
    let neq = builtin("!=")?;
    let rels: Vec<(&str, &TemporalRelation)> = a
        .relations()
        .iter()
        .filter(|(_, r)| r.arity() <= max_vars)
        .map(|(s, r)| (s.as_str(), r))
        .collect();
    if rels.is_empty() || max_vars < 2 {
        return Ok(IndependenceReport::NoneFound { trials: 0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let n = rng.gen_range(2..=max_vars);
        let atoms = rng.gen_range(1..=n + 1);
        let mut cons: Vec<Constraint> = Vec::with_capacity(atoms);
        for _ in 0..atoms {
            let (sym, rel) = rels[rng.gen_range(0..rels.len())];
            let args = (0..rel.arity()).map(|_| rng.gen_range(0..n)).collect();
            cons.push(Constraint::new(sym, args));
        }
        let base: Vec<(Vec<usize>, &TemporalRelation)> =
            cons.iter().map(|c| Ok((c.args.clone(), a.lookup(&c.symbol)?))).collect::<Result<_>>()?;
        if first_model(n, &base)?.is_none() {
            continue;
        }
        let mut candidates: Vec<(usize, usize)> = Vec::new();
        for x in 0..n {
            for y in x + 1..n {
                if sat_with(n, &base, &neq, &[(x, y)])? {
                    candidates.push((x, y));
                }
            }
        }
        if candidates.len() < 2 {
            continue;
        }
        let mut subsets: Vec<Vec<(usize, usize)>> = Vec::new();
        for i in 0..candidates.len() {
            for j in i + 1..candidates.len() {
                subsets.push(vec![candidates[i], candidates[j]]);
            }
        }
        if candidates.len() > 2 {
            subsets.push(candidates.clone());
        }
        for pairs in subsets {
            if !sat_with(n, &base, &neq, &pairs)? {
                let vars = (0..n).map(|i| format!("v{}", i + 1)).collect();
                return Ok(IndependenceReport::Counterexample(IndependenceCounterexample {
                    vars,
                    constraints: cons,
                    pairs,
                }));
            }
        }
    }
    Ok(IndependenceReport::NoneFound { trials })
}

impl IndependenceCounterexample {
    /// Re-checks the counterexample from scratch against `a`.
    pub fn verify(&self, a: &TemporalStructure) -> Result<bool> {
        let neq = builtin("!=")?;
        let mut inst = Instance::new(a.clone());
        for v in &self.vars {
            inst.var(v);
        }
        for c in &self.constraints {
            inst.push(c.clone())?;
        }
        let base = inst.resolved()?;
        let n = self.vars.len();
        for &p in &self.pairs {
            if !sat_with(n, &base, &neq, &[p])? {
                return Ok(false);
            }
        }
        Ok(!sat_with(n, &base, &neq, &self.pairs)?)
    }
}
