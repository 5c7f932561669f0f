//! Polynomial-time solver for instances whose relations are preserved by min.
//!
//! Every such relation is a conjunction of clauses `h > y1 ∨ ... ∨ h ≥ z1
//! ∨ ...`. A solution is built from the bottom level upwards: the largest
//! set of variables that can share the minimum value is found as a greatest
//! fixpoint, fixed, and the clauses it satisfies are dropped. Since the
//! solution set is closed under min, taking the largest feasible level never
//! rules out a solution.

use std::collections::BTreeMap;

use super::instance::Instance;
use super::oracle::SolveOutcome;
use crate::error::{Error, Result};
use crate::formula::{Cmp, OrderCnf};
use crate::normal_form::{form_clause, synthesize_form, Form};

/// A clause `head ∘ target ∨ ...` over instance variables; `weak` holds
/// the `≥` targets and `strict` the `>` targets.
#[derive(Debug, Clone)]
struct HornClause {
    head: usize,
    strict: Vec<usize>,
    weak: Vec<usize>,
}

/// Compiles an instance into min-form clauses; `None` when a clause is
/// unsatisfiable outright.
fn compile(inst: &Instance) -> Result<Option<Vec<HornClause>>> {
    let mut forms: BTreeMap<&str, OrderCnf> = BTreeMap::new();
    for c in inst.constraints() {
        if forms.contains_key(c.symbol.as_str()) {
            continue;
        }
        let rel = inst.structure().lookup(&c.symbol)?;
        let cnf = synthesize_form(rel, Form::Min)?.ok_or_else(|| {
            Error::WrongFragment(format!("relation `{}` is not preserved by min", c.symbol))
        })?;
        forms.insert(c.symbol.as_str(), cnf);
    }
    let mut out = Vec::new();
    for c in inst.constraints() {
        for clause in forms[c.symbol.as_str()].clauses() {
            if clause.is_empty() {
                return Ok(None);
            }
            let (h, lits) = form_clause(clause, Form::Min)
                .ok_or_else(|| Error::Internal("synthesized clause is not in min form".into()))?;
            let head = c.args[h];
            let mut hc = HornClause {
                head,
                strict: Vec::new(),
                weak: Vec::new(),
            };
            let mut trivially_true = false;
            for l in lits {
                let target = c.args[l.rhs];
                match (l.op, target == head) {
                    (Cmp::Ge, true) => trivially_true = true,
                    (Cmp::Gt, true) => {}
                    (Cmp::Ge, false) => hc.weak.push(target),
                    _ => hc.strict.push(target),
                }
            }
            if trivially_true {
                continue;
            }
            if hc.strict.is_empty() && hc.weak.is_empty() {
                return Ok(None);
            }
            out.push(hc);
        }
    }
    Ok(Some(out))
}

/// Decides an instance all of whose relations are preserved by min.
pub fn solve_min_closed(inst: &Instance) -> Result<SolveOutcome> {
    let Some(mut clauses) = compile(inst)? else {
        return Ok(SolveOutcome::Unsat);
    };
    let n = inst.num_vars();
    let mut remaining = vec![true; n];
    let mut rank = vec![0u8; n];
    let mut level = 0u8;
    while remaining.iter().any(|&r| r) {
        // Greatest set M of remaining variables that can all take the
        // minimum: a head in M needs a weak target in M.
        let mut in_m = remaining.clone();
        loop {
            let mut changed = false;
            for c in &clauses {
                if in_m[c.head] && !c.weak.iter().any(|&w| in_m[w]) {
                    in_m[c.head] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if !in_m.iter().any(|&m| m) {
            return Ok(SolveOutcome::Unsat);
        }
        for v in 0..n {
            if in_m[v] {
                rank[v] = level;
                remaining[v] = false;
            }
        }
        // Heads in M are satisfied by the fixpoint; heads above M are
        // satisfied by any literal pointing into M.
        clauses.retain(|c| !in_m[c.head] && !c.strict.iter().chain(&c.weak).any(|&t| in_m[t]));
        level += 1;
    }
    if !inst.satisfied_by(&rank)? {
        return Err(Error::Internal("min-closed solver produced an invalid assignment".into()));
    }
    Ok(SolveOutcome::Sat { witness: rank })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::positional_names;
    use crate::relation::relation_from_cnf;
    use crate::structure::TemporalStructure;
    use crate::syntax::parse_order_formula;

    fn rel(src: &str, k: usize) -> crate::TemporalRelation {
        let f = parse_order_formula(src, &positional_names(k)).unwrap();
        relation_from_cnf(&f.to_cnf(positional_names(k)).unwrap()).unwrap()
    }

    #[test]
    fn three_way_strict_cycle_is_unsat() {
        let a = TemporalStructure::new("A").with("C", rel("x1 > x2 | x1 > x3", 3)).unwrap();
        let mut i = Instance::new(a);
        i.add("C", &["x", "y", "z"]).unwrap();
        i.add("C", &["y", "x", "z"]).unwrap();
        i.add("C", &["z", "x", "y"]).unwrap();
        assert_eq!(solve_min_closed(&i).unwrap(), SolveOutcome::Unsat);
    }

    #[test]
    fn weak_clause_allows_all_equal() {
        let a = TemporalStructure::new("A").with("W", rel("x1 >= x2 | x1 > x3", 3)).unwrap();
        let mut i = Instance::new(a);
        i.add("W", &["x", "y", "z"]).unwrap();
        assert_eq!(solve_min_closed(&i).unwrap(), SolveOutcome::Sat { witness: vec![0, 0, 0] });
    }

    #[test]
    fn strict_order_is_sat() {
        let a = TemporalStructure::from_builtins("A", &["<"]).unwrap();
        let mut i = Instance::new(a);
        i.add("<", &["y", "x"]).unwrap();
        assert_eq!(solve_min_closed(&i).unwrap(), SolveOutcome::Sat { witness: vec![0, 1] });
    }

    #[test]
    fn rejects_non_min_relations() {
        let a = TemporalStructure::from_builtins("A", &["Betw"]).unwrap();
        let mut i = Instance::new(a);
        i.add("Betw", &["x", "y", "z"]).unwrap();
        assert!(matches!(solve_min_closed(&i), Err(Error::WrongFragment(_))));
    }
}
