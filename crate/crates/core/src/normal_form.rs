//! Syntactic normal forms of relations preserved by `pp`, `min`, `mi`,
//! `mix`, and `ll`: recognition of the clause shapes and synthesis of a
//! reduced CNF in a given shape.

use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{Clause, Cmp, Literal, OrderCnf};
use crate::ops::OpSpec;
use crate::order::{enumerate_weak_orders, WeakOrder};
use crate::relation::{TemporalRelation, DEFAULT_ARITY_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Form {
    Pp,
    Min,
    Mi,
    Mix,
    Ll,
}

impl Form {
    pub const SYNTHESIZABLE: [Form; 4] = [Form::Pp, Form::Min, Form::Mi, Form::Mix];

    pub fn name(self) -> &'static str {
        match self {
            Form::Pp => "pp",
            Form::Min => "min",
            Form::Mi => "mi",
            Form::Mix => "mix",
            Form::Ll => "ll",
        }
    }

    /// The operation whose invariant relations this form describes.
    pub fn op(self) -> OpSpec {
        match self {
            Form::Pp => OpSpec::PP,
            Form::Min => OpSpec::MIN,
            Form::Mi => OpSpec::MI,
            Form::Mix => OpSpec::MIX,
            Form::Ll => OpSpec::LL,
        }
    }

    /// Connectives allowed in a single clause, oriented towards its head.
    fn connectives(self) -> &'static [Cmp] {
        match self {
            Form::Pp => &[Cmp::Ne, Cmp::Ge],
            Form::Min => &[Cmp::Gt, Cmp::Ge],
            Form::Mi => &[Cmp::Ne, Cmp::Gt, Cmp::Ge],
            Form::Mix => &[Cmp::Ne, Cmp::Gt],
            Form::Ll => &[Cmp::Gt],
        }
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Form {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "pp" => Form::Pp,
            "min" => Form::Min,
            "mi" => Form::Mi,
            "mix" => Form::Mix,
            "ll" => Form::Ll,
            _ => return Err(Error::Contract(format!("unknown normal form `{s}`"))),
        })
    }
}

/// The clause with every literal written with `head` on the left, if
/// every literal mentions `head`.
fn orient(clause: &Clause, head: usize) -> Option<Vec<Literal>> {
    clause.iter().map(|l| l.oriented(head)).collect()
}

fn heads(clause: &Clause) -> Vec<usize> {
    let mut hs: Vec<usize> = clause
        .first()
        .map(|l| vec![l.lhs, l.rhs])
        .unwrap_or_default();
    hs.dedup();
    hs
}

/// Head and oriented literals of a single clause of `form` (not `ll`);
/// `None` for other shapes and for ⊥.
pub(crate) fn form_clause(clause: &Clause, form: Form) -> Option<(usize, Vec<Literal>)> {
    heads(clause).into_iter().find_map(|h| {
        let lits = orient(clause, h)?;
        (lits.iter().all(|l| form.connectives().contains(&l.op))
            && (form != Form::Mi || lits.iter().filter(|l| l.op == Cmp::Ge).count() <= 1))
            .then_some((h, lits))
    })
}

/// Single-clause shape test: a common head, allowed connectives, and for
/// `mi` at most one `≥`.
fn single_clause_matches(clause: &Clause, form: Form) -> bool {
    if clause.is_empty() {
        return true;
    }
    if form == Form::Ll {
        return ll_clause_matches(clause);
    }
    form_clause(clause, form).is_some()
}

/// `(h > y1 ∨ ... ∨ h > ym) ∨ [h = y1 when m = 1] ∨ ⋁ u_i ≠ v_i` with the
/// disequality pairs on fresh, pairwise disjoint variables. The equality
/// chain of the general shape is a single literal only for two variables,
/// where `h > y ∨ h = y` is written `h ≥ y`.
fn ll_clause_matches(clause: &Clause) -> bool {
    let (neqs, rest): (Vec<&Literal>, Vec<&Literal>) = clause.iter().partition(|l| l.op == Cmp::Ne);
    let mut used: Vec<usize> = Vec::new();
    let head_ok = if rest.is_empty() {
        true
    } else {
        let candidates = [rest[0].lhs, rest[0].rhs];
        candidates.into_iter().any(|h| {
            let Some(lits) = rest.iter().map(|l| l.oriented(h)).collect::<Option<Vec<_>>>() else {
                return false;
            };
            let strict = lits.iter().all(|l| l.op == Cmp::Gt);
            let weak_pair = lits.len() == 1 && lits[0].op == Cmp::Ge;
            if strict || weak_pair {
                used = std::iter::once(h).chain(lits.iter().map(|l| l.rhs)).collect();
                true
            } else {
                false
            }
        })
    };
    if !head_ok {
        return false;
    }
    for l in neqs {
        if l.lhs == l.rhs || used.contains(&l.lhs) || used.contains(&l.rhs) {
            return false;
        }
        used.push(l.lhs);
        used.push(l.rhs);
    }
    true
}

/// `x ≥ y ∨ ⋁ x > w` as `(x, y, W)` with `W` sorted, if the clause has
/// that shape.
pub(crate) fn mix_pair_half(clause: &Clause) -> Option<(usize, usize, Vec<usize>)> {
    heads(clause).into_iter().find_map(|h| {
        let lits = orient(clause, h)?;
        let ge: Vec<&Literal> = lits.iter().filter(|l| l.op == Cmp::Ge).collect();
        if ge.len() != 1 || lits.iter().any(|l| !matches!(l.op, Cmp::Ge | Cmp::Gt)) {
            return None;
        }
        let mut w: Vec<usize> = lits.iter().filter(|l| l.op == Cmp::Gt).map(|l| l.rhs).collect();
        w.sort_unstable();
        Some((h, ge[0].rhs, w))
    })
}

/// Purely syntactic test of whether every clause has the shape of `form`.
/// For `mix`, clauses containing `≥` must pair up into the two halves of a
/// `φ^mix` conjunction over the same strict targets.
pub fn recognize_form(cnf: &OrderCnf, form: Form) -> bool {
    if form != Form::Mix {
        return cnf.clauses().iter().all(|c| single_clause_matches(c, form));
    }
    let mut halves: Vec<(usize, usize, Vec<usize>)> = Vec::new();
    for c in cnf.clauses() {
        if single_clause_matches(c, Form::Mix) {
            continue;
        }
        match mix_pair_half(c) {
            Some(h) => halves.push(h),
            None => return false,
        }
    }
    while let Some((x, y, w)) = halves.pop() {
        match halves.iter().position(|(a, b, v)| *a == y && *b == x && *v == w) {
            Some(i) => {
                halves.swap_remove(i);
            }
            None => return false,
        }
    }
    true
}

/// A candidate clause; mix pairs are kept together so that reduction
/// treats them as a unit.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Unit {
    Single(Clause),
    Pair(Clause, Clause),
}

impl Unit {
    fn clauses(&self) -> Vec<&Clause> {
        match self {
            Unit::Single(c) => vec![c],
            Unit::Pair(a, b) => vec![a, b],
        }
    }
}

/// Weak orders of one arity with per-orbit evaluation as bitsets.
struct Universe {
    orbits: Vec<WeakOrder>,
}

impl Universe {
    fn new(arity: usize) -> Result<Self> {
        Ok(Universe {
            orbits: enumerate_weak_orders(arity)?,
        })
    }

    fn models(&self, clauses: &[&Clause]) -> FixedBitSet {
        let mut bits = FixedBitSet::with_capacity(self.orbits.len());
        for (i, o) in self.orbits.iter().enumerate() {
            if clauses.iter().all(|c| c.iter().any(|l| l.eval(o.ranks()))) {
                bits.insert(i);
            }
        }
        bits
    }

    fn relation_bits(&self, r: &TemporalRelation) -> FixedBitSet {
        let mut bits = FixedBitSet::with_capacity(self.orbits.len());
        for (i, o) in self.orbits.iter().enumerate() {
            if r.contains(o) {
                bits.insert(i);
            }
        }
        bits
    }
}

fn candidate_units(arity: usize, form: Form) -> Vec<Unit> {
    let single_form = form;
    let mut out = Vec::new();
    for head in 0..arity {
        let others: Vec<usize> = (0..arity).filter(|&v| v != head).collect();
        let choices = single_form.connectives().len() + 1;
        let total = choices.pow(others.len() as u32);
        for code in 1..total {
            let mut c = code;
            let mut clause = Vec::new();
            for &v in &others {
                let pick = c % choices;
                c /= choices;
                if pick > 0 {
                    clause.push(Literal::new(head, single_form.connectives()[pick - 1], v));
                }
            }
            if single_form == Form::Mi && clause.iter().filter(|l| l.op == Cmp::Ge).count() > 1 {
                continue;
            }
            out.push(Unit::Single(clause));
        }
    }
    if form == Form::Mix {
        for x in 0..arity {
            for y in x + 1..arity {
                let rest: Vec<usize> = (0..arity).filter(|&v| v != x && v != y).collect();
                for mask in 0u32..(1 << rest.len()) {
                    let w: Vec<usize> = rest
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, &v)| v)
                        .collect();
                    out.push(mix_pair(x, y, &w));
                }
            }
        }
    }
    out
}

fn mix_pair(x: usize, y: usize, w: &[usize]) -> Unit {
    let half = |h: usize, o: usize| -> Clause {
        let mut c = vec![Literal::new(h, Cmp::Ge, o)];
        c.extend(w.iter().map(|&v| Literal::new(h, Cmp::Gt, v)));
        c
    };
    Unit::Pair(half(x, y), half(y, x))
}

/// Strengthenings of a unit obtained by dropping one literal (both halves
/// of a mix pair at once), in a fixed order. Each entry replaces the unit.
fn weakenings(unit: &Unit) -> Vec<Vec<Unit>> {
    match unit {
        Unit::Single(c) => (0..c.len())
            .map(|i| {
                let mut d = c.clone();
                d.remove(i);
                vec![Unit::Single(d)]
            })
            .collect(),
        Unit::Pair(a, b) => {
            let (x, y) = (a[0].lhs, b[0].lhs);
            let w: Vec<usize> = a[1..].iter().map(|l| l.rhs).collect();
            let mut out: Vec<Vec<Unit>> = (0..w.len())
                .map(|i| {
                    let mut v = w.clone();
                    v.remove(i);
                    vec![mix_pair(x, y, &v)]
                })
                .collect();
            // Dropping both weak literals leaves two strict single clauses.
            out.push(vec![Unit::Single(a[1..].to_vec()), Unit::Single(b[1..].to_vec())]);
            out
        }
    }
}

/// A reduced CNF of shape `form` defining `r`, or `None` if no conjunction
/// of clauses of that shape defines `r`.
pub fn synthesize_form(r: &TemporalRelation, form: Form) -> Result<Option<OrderCnf>> {
    synthesize_form_with(r, form, DEFAULT_ARITY_CAP)
}

pub fn synthesize_form_with(r: &TemporalRelation, form: Form, arity_cap: usize) -> Result<Option<OrderCnf>> {
    if form == Form::Ll {
        return Err(Error::Contract("ll-form synthesis is not supported; use recognize_form".into()));
    }
    let arity = r.arity();
    if arity > arity_cap {
        return Err(Error::ArityCap { arity, cap: arity_cap });
    }
    if r.is_empty() {
        return Ok(Some(OrderCnf::positional(arity, vec![vec![]])?));
    }
    let uni = Universe::new(arity)?;
    let target = uni.relation_bits(r);
    let entailed = |u: &Unit| target.is_subset(&uni.models(&u.clauses()));

    let mut units: Vec<Unit> = candidate_units(arity, form).into_iter().filter(|u| entailed(u)).collect();
    let conj = |units: &[Unit]| -> FixedBitSet {
        let clauses: Vec<&Clause> = units.iter().flat_map(Unit::clauses).collect();
        uni.models(&clauses)
    };
    if conj(&units) != target {
        return Ok(None);
    }

    loop {
        let mut changed = false;
        let mut i = 0;
        while i < units.len() {
            match weakenings(&units[i]).into_iter().find(|rep| rep.iter().all(&entailed)) {
                Some(rep) => {
                    units.splice(i..=i, rep);
                    changed = true;
                }
                None => i += 1,
            }
        }
        let mut i = 0;
        while i < units.len() {
            let mut rest = units.clone();
            rest.remove(i);
            if conj(&rest) == target {
                units = rest;
                changed = true;
            } else {
                i += 1;
            }
        }
        if !changed {
            break;
        }
    }

    let mut clauses: Vec<Clause> = Vec::new();
    for u in &units {
        for c in u.clauses() {
            if !clauses.contains(c) {
                clauses.push(c.clone());
            }
        }
    }
    let cnf = OrderCnf::positional(arity, clauses)?;
    debug_assert!(recognize_form(&cnf, form));
    Ok(Some(cnf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::positional_names;
    use crate::relation::{builtin, relation_from_cnf};
    use crate::syntax::parse_order_formula;

    fn cnf(src: &str, arity: usize) -> OrderCnf {
        parse_order_formula(src, &positional_names(arity))
            .unwrap()
            .to_cnf(positional_names(arity))
            .unwrap()
    }

    #[test]
    fn phi_mix_is_min_and_mi_form() {
        let phi = cnf("(x1 >= x2 | x1 > x3 | x1 > x4) & (x2 >= x1 | x2 > x3 | x2 > x4)", 4);
        assert!(recognize_form(&phi, Form::Min));
        assert!(recognize_form(&phi, Form::Mi));
        assert!(recognize_form(&phi, Form::Mix));
        assert!(!recognize_form(&phi, Form::Pp));
    }

    #[test]
    fn mi_form_allows_one_weak_literal() {
        assert!(!recognize_form(&cnf("x1 > x2 | x1 >= x3 | x1 >= x4", 4), Form::Mi));
        assert!(recognize_form(&cnf("x1 > x2 | x1 > x3", 3), Form::Min));
        assert!(recognize_form(&cnf("x2 < x1 | x3 != x1", 3), Form::Mi));
    }

    #[test]
    fn ll_shapes() {
        assert!(recognize_form(&cnf("x1 > x2 | x1 > x3 | x4 != x5", 5), Form::Ll));
        assert!(recognize_form(&cnf("x1 >= x2 | x3 != x4", 4), Form::Ll));
        assert!(!recognize_form(&cnf("x1 > x2 | x2 != x3", 3), Form::Ll));
        assert!(!recognize_form(&cnf("x1 >= x2 | x1 > x3", 3), Form::Ll));
    }

    #[test]
    fn synthesizes_rmix_in_min_form() {
        let r = builtin("Rmix").unwrap();
        let out = synthesize_form(&r, Form::Min).unwrap().unwrap();
        assert_eq!(out.to_string(), "(x1 >= x2 | x1 > x3) & (x2 >= x1 | x2 > x3)");
        assert_eq!(relation_from_cnf(&out).unwrap(), r);
    }

    #[test]
    fn betweenness_has_no_min_form() {
        assert!(synthesize_form(&builtin("Betw").unwrap(), Form::Min).unwrap().is_none());
    }

    #[test]
    fn equality_in_every_form() {
        let eq = builtin("=").unwrap();
        for form in Form::SYNTHESIZABLE {
            let out = synthesize_form(&eq, form).unwrap().unwrap();
            assert_eq!(relation_from_cnf(&out).unwrap(), eq, "{form}");
        }
    }
}
