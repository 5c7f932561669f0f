//! Exact satisfiability by search over weak orders of the variables.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::instance::{CombinedInstance, Instance, Side};
use crate::error::{Error, Result};
use crate::relation::{builtin, TemporalRelation};
use crate::search::Csp;
use crate::structure::Caps;

/// Answer of a single-structure solver. A witness lists one rank per
/// variable (rank 0 is the smallest value).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveOutcome {
    Sat { witness: Vec<u8> },
    Unsat,
}

impl SolveOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveOutcome::Sat { .. })
    }
}

/// Answer of a combined solver: one weak order per side, with identical
/// equality kernels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CombinedOutcome {
    Sat { first: Vec<u8>, second: Vec<u8> },
    Unsat,
}

impl CombinedOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, CombinedOutcome::Sat { .. })
    }
}

fn check_vars(n: usize, caps: &Caps) -> Result<()> {
    if n > caps.oracle_vars {
        return Err(Error::Resource {
            what: "oracle variables",
            got: n,
            cap: caps.oracle_vars,
        });
    }
    Ok(())
}

/// First satisfying weak order of `n` variables under raw relation
/// constraints.
pub(crate) fn first_model(n: usize, cons: &[(Vec<usize>, &TemporalRelation)]) -> Result<Option<Vec<u8>>> {
    if n == 0 {
        return Ok(cons.iter().all(|(_, r)| !r.is_empty()).then(Vec::new));
    }
    Ok(Csp::new(n, cons, 0)?.first_solution())
}

pub fn solve_oracle(inst: &Instance) -> Result<SolveOutcome> {
    solve_oracle_with(inst, &Caps::default())
}

pub fn solve_oracle_with(inst: &Instance, caps: &Caps) -> Result<SolveOutcome> {
    check_vars(inst.num_vars(), caps)?;
    let cons = inst.resolved()?;
    Ok(match first_model(inst.num_vars(), &cons)? {
        Some(witness) => SolveOutcome::Sat { witness },
        None => SolveOutcome::Unsat,
    })
}

/// Set partitions of `0..n` as restricted growth strings, in
/// lexicographic order.
pub(crate) fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, n: usize, blocks: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..=blocks {
            cur.push(b);
            rec(cur, n, blocks.max(b + 1), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), n, 0, &mut out);
    out
}

pub fn solve_combined_oracle(inst: &CombinedInstance) -> Result<CombinedOutcome> {
    solve_combined_oracle_with(inst, &Caps::default())
}

/// Enumerates the equality kernel (a set partition of the variables) and,
/// per side, searches for a strict linear order of its blocks.
pub fn solve_combined_oracle_with(inst: &CombinedInstance, caps: &Caps) -> Result<CombinedOutcome> {
    let n = inst.num_vars();
    check_vars(n, caps)?;
    let neq = builtin("!=")?;
    let sides: Vec<_> = [Side::First, Side::Second]
        .into_iter()
        .map(|s| inst.side_instance(s).resolved().map(|c| c.into_iter().map(|(a, r)| (a, r.clone())).collect::<Vec<_>>()))
        .collect::<Result<_>>()?;
    let partitions = set_partitions(n);
    let found = partitions.par_iter().find_map_first(|part| {
        let k = part.iter().max().map_or(0, |m| m + 1);
        let mut distinct: Vec<(Vec<usize>, &TemporalRelation)> = Vec::new();
        for a in 0..k {
            for b in a + 1..k {
                distinct.push((vec![a, b], &neq));
            }
        }
        let mut orders = Vec::with_capacity(2);
        for side in &sides {
            let mut cons = distinct.clone();
            cons.extend(side.iter().map(|(args, r)| (args.iter().map(|&v| part[v]).collect(), r)));
            match first_model(k, &cons) {
                Ok(Some(blocks)) => orders.push(part.iter().map(|&b| blocks[b]).collect::<Vec<u8>>()),
                Ok(None) => return None,
                Err(e) => return Some(Err(e)),
            }
        }
        let second = orders.pop().unwrap();
        let first = orders.pop().unwrap();
        Some(Ok((first, second)))
    });
    match found {
        Some(Ok((first, second))) => Ok(CombinedOutcome::Sat { first, second }),
        Some(Err(e)) => Err(e),
        None => Ok(CombinedOutcome::Unsat),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::TemporalStructure;

    #[test]
    fn partitions_are_bell_numbers() {
        let counts: Vec<usize> = (0..7).map(|n| set_partitions(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 15, 52, 203]);
    }

    #[test]
    fn cap_is_enforced() {
        let a = TemporalStructure::from_builtins("A", &["<"]).unwrap();
        let names: Vec<String> = (0..9).map(|i| format!("v{i}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let inst = Instance::with_vars(a, &refs).unwrap();
        assert!(matches!(solve_oracle(&inst), Err(Error::Resource { .. })));
    }
}
