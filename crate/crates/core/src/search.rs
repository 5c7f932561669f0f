//! Backtracking search over weak orders of a variable set subject to
//! orbit-membership constraints.
//!
//! Variables are placed one at a time into an ordered list of blocks; a new
//! variable either joins an existing block or opens a block in one of the
//! gaps. Inserting a block never changes the relative order of variables
//! already placed, so each constraint is checked exactly once, at the level
//! where its last variable is placed.

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::order::{canonical_key, MAX_POINTS};

/// Largest variable count handled by the search. Only constraint scopes and
/// the prefix are packed into orbit keys, so this may exceed `MAX_POINTS`.
pub(crate) const MAX_CSP_VARS: usize = 32;
use crate::relation::TemporalRelation;

type Scope = SmallVec<[usize; 8]>;

pub(crate) struct Csp<'a> {
    n: usize,
    /// Variable placed at each level.
    order: Vec<usize>,
    /// Constraints completed at each level.
    checks: Vec<Vec<(Scope, &'a TemporalRelation)>>,
}

struct State {
    ranks: [u8; MAX_CSP_VARS],
    blocks: u8,
}

impl<'a> Csp<'a> {
    /// `prefix` variables (indices `0..prefix`) are placed before all others,
    /// which lets callers enumerate orbits of the prefix and then ask for an
    /// extension.
    pub fn new(n: usize, constraints: &[(Vec<usize>, &'a TemporalRelation)], prefix: usize) -> Result<Self> {
        if n > MAX_CSP_VARS {
            return Err(Error::Resource {
                what: "variables",
                got: n,
                cap: MAX_CSP_VARS,
            });
        }
        if prefix > MAX_POINTS {
            return Err(Error::Resource {
                what: "free variables",
                got: prefix,
                cap: MAX_POINTS,
            });
        }
        for (scope, rel) in constraints {
            if scope.len() != rel.arity() {
                return Err(Error::Signature(format!(
                    "constraint with {} arguments on a relation of arity {}",
                    scope.len(),
                    rel.arity()
                )));
            }
            if let Some(&v) = scope.iter().find(|&&v| v >= n) {
                return Err(Error::Contract(format!("variable index {v} out of range")));
            }
        }
        let order = variable_order(n, constraints, prefix);
        let mut level_of = vec![0; n];
        for (lvl, &v) in order.iter().enumerate() {
            level_of[v] = lvl;
        }
        let mut checks = vec![Vec::new(); n];
        for (scope, rel) in constraints {
            if scope.is_empty() {
                continue;
            }
            let lvl = scope.iter().map(|&v| level_of[v]).max().unwrap();
            checks[lvl].push((Scope::from_slice(scope), *rel));
        }
        Ok(Csp { n, order, checks })
    }

    /// Calls `visit` with the dense rank vector of every solution, in a
    /// deterministic order, until it returns `true`. Returns whether the
    /// visit was stopped early.
    pub fn for_each_solution(&self, mut visit: impl FnMut(&[u8]) -> bool) -> bool {
        if self.checks.iter().flatten().any(|(_, r)| r.is_empty()) {
            return false;
        }
        let mut st = State {
            ranks: [0; MAX_CSP_VARS],
            blocks: 0,
        };
        self.dfs(0, self.n, &mut st, &mut |st: &State| visit(&st.ranks[..self.n]))
    }

    pub fn first_solution(&self) -> Option<Vec<u8>> {
        let mut out = None;
        self.for_each_solution(|r| {
            out = Some(r.to_vec());
            true
        });
        out
    }

    /// Packed orbit keys of the prefix variables over all solutions.
    pub fn prefix_projections(&self, prefix: usize) -> Vec<Vec<u8>> {
        if self.checks.iter().flatten().any(|(_, r)| r.is_empty()) {
            return Vec::new();
        }
        debug_assert!(self.order[..prefix].iter().all(|&v| v < prefix));
        let mut out = Vec::new();
        let mut st = State {
            ranks: [0; MAX_CSP_VARS],
            blocks: 0,
        };
        self.dfs(0, prefix, &mut st, &mut |st: &State| {
            let mut inner = State {
                ranks: st.ranks,
                blocks: st.blocks,
            };
            if self.dfs(prefix, self.n, &mut inner, &mut |_| true) {
                out.push(normalize(&st.ranks[..prefix]));
            }
            false
        });
        out
    }

    fn dfs(&self, level: usize, stop: usize, st: &mut State, leaf: &mut dyn FnMut(&State) -> bool) -> bool {
        if level == stop {
            return leaf(st);
        }
        let v = self.order[level];
        let placed = &self.order[..level];
        for b in 0..st.blocks {
            st.ranks[v] = b;
            if self.consistent(level, st) && self.dfs(level + 1, stop, st, leaf) {
                return true;
            }
        }
        for gap in 0..=st.blocks {
            for &u in placed {
                if st.ranks[u] >= gap {
                    st.ranks[u] += 1;
                }
            }
            st.ranks[v] = gap;
            st.blocks += 1;
            let found = self.consistent(level, st) && self.dfs(level + 1, stop, st, leaf);
            st.blocks -= 1;
            for &u in placed {
                if st.ranks[u] > gap {
                    st.ranks[u] -= 1;
                }
            }
            if found {
                return true;
            }
        }
        false
    }

    fn consistent(&self, level: usize, st: &State) -> bool {
        self.checks[level].iter().all(|(scope, rel)| {
            let vals: SmallVec<[u8; 8]> = scope.iter().map(|&v| st.ranks[v]).collect();
            rel.contains_key(canonical_key(&vals))
        })
    }
}

fn normalize(vals: &[u8]) -> Vec<u8> {
    let key = canonical_key(vals);
    (0..vals.len()).map(|i| (key >> (4 * i) & 0xf) as u8).collect()
}

/// Greedy order: within the prefix and within the rest, repeatedly pick the
/// variable sharing the most constraints with already placed variables.
fn variable_order(n: usize, constraints: &[(Vec<usize>, &TemporalRelation)], prefix: usize) -> Vec<usize> {
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for segment in [0..prefix.min(n), prefix.min(n)..n] {
        let mut remaining: Vec<usize> = segment.collect();
        while !remaining.is_empty() {
            let score = |v: usize| -> (usize, usize) {
                let mut linked = 0;
                let mut degree = 0;
                for (scope, _) in constraints {
                    if scope.contains(&v) {
                        degree += 1;
                        if scope.iter().any(|&u| placed[u]) {
                            linked += 1;
                        }
                    }
                }
                (linked, degree)
            };
            let (idx, _) = remaining
                .iter()
                .enumerate()
                .max_by(|(i, &a), (j, &b)| score(a).cmp(&score(b)).then(j.cmp(i)))
                .unwrap();
            let v = remaining.remove(idx);
            placed[v] = true;
            order.push(v);
        }
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relation::builtin;

    #[test]
    fn unconstrained_counts_match_ordered_bell() {
        let csp = Csp::new(4, &[], 0).unwrap();
        let mut count = 0;
        csp.for_each_solution(|_| {
            count += 1;
            false
        });
        assert_eq!(count, 75);
    }

    #[test]
    fn cyclic_strict_order_unsat() {
        let lt = builtin("<").unwrap();
        let cons = vec![(vec![0, 1], &lt), (vec![1, 2], &lt), (vec![2, 0], &lt)];
        assert!(Csp::new(3, &cons, 0).unwrap().first_solution().is_none());
    }

    #[test]
    fn projection_of_existential() {
        // exists z . T3(x,y,z) defines x <= y
        let t3 = builtin("T3").unwrap();
        let cons = vec![(vec![0, 1, 2], &t3)];
        let mut proj = Csp::new(3, &cons, 2).unwrap().prefix_projections(2);
        proj.sort();
        assert_eq!(proj, vec![vec![0, 0], vec![0, 1]]);
    }
}
