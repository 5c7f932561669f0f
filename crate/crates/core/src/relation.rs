//! Temporal relations stored extensionally as sets of orbits.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{positional_names, Clause, Cmp, Literal, OrderCnf, OrderFormula};
use crate::order::{chi, chi0, enumerate_weak_orders, MinTuple, WeakOrder};
use crate::syntax::parse_order_formula;

/// Default upper bound on relation arity.
pub const DEFAULT_ARITY_CAP: usize = 6;

/// A relation over (Q;<) given by the orbits of its tuples.
#[derive(Clone, Serialize, Deserialize)]
pub struct TemporalRelation {
    arity: usize,
    orbits: BTreeSet<WeakOrder>,
    #[serde(skip)]
    keys: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
}

impl PartialEq for TemporalRelation {
    fn eq(&self, other: &Self) -> bool {
        self.arity == other.arity && self.orbits == other.orbits
    }
}

impl Eq for TemporalRelation {}

impl fmt::Debug for TemporalRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = &self.name {
            write!(f, "{n}/{} ", self.arity)?;
        }
        f.debug_set().entries(self.orbits.iter()).finish()
    }
}

impl TemporalRelation {
    pub fn new(arity: usize, orbits: impl IntoIterator<Item = WeakOrder>) -> Result<Self> {
        if arity == 0 || arity > crate::order::MAX_POINTS {
            return Err(Error::InvalidArity(arity));
        }
        let orbits: BTreeSet<WeakOrder> = orbits.into_iter().collect();
        if let Some(bad) = orbits.iter().find(|o| o.len() != arity) {
            return Err(Error::Contract(format!(
                "orbit {bad} has length {} in a relation of arity {arity}",
                bad.len()
            )));
        }
        Ok(Self::from_set(arity, orbits))
    }

    fn from_set(arity: usize, orbits: BTreeSet<WeakOrder>) -> Self {
        let mut keys: Vec<u64> = orbits.iter().map(WeakOrder::key).collect();
        keys.sort_unstable();
        TemporalRelation {
            arity,
            orbits,
            keys,
            name: None,
        }
    }

    /// Builds a relation from rank vectors; panics on malformed input.
    /// Intended for literals in tests and tables.
    pub fn from_ranks(arity: usize, ranks: &[&[u8]]) -> Self {
        let orbits = ranks.iter().map(|r| WeakOrder::new(r).expect("valid rank vector"));
        Self::new(arity, orbits).expect("consistent arity")
    }

    pub fn empty(arity: usize) -> Result<Self> {
        Self::new(arity, [])
    }

    pub fn full(arity: usize) -> Result<Self> {
        Self::new(arity, enumerate_weak_orders(arity)?)
    }

    /// All orbits whose representative satisfies `pred`.
    pub fn from_predicate(arity: usize, pred: impl Fn(&[u8]) -> bool) -> Result<Self> {
        let orbits = enumerate_weak_orders(arity)?
            .into_iter()
            .filter(|w| pred(w.ranks()));
        Self::new(arity, orbits)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn orbits(&self) -> &BTreeSet<WeakOrder> {
        &self.orbits
    }

    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    pub fn contains(&self, w: &WeakOrder) -> bool {
        self.contains_key(w.key())
    }

    /// Membership by packed key (see [`WeakOrder::key`]).
    pub fn contains_key(&self, key: u64) -> bool {
        self.keys.binary_search(&key).is_ok()
    }

    /// Whether the tuple of values (any `Ord` type) lies in the relation.
    pub fn holds<T: Ord>(&self, values: &[T]) -> bool {
        values.len() == self.arity && self.contains(&WeakOrder::from_values(values))
    }

    pub fn contains_constant(&self) -> bool {
        self.contains_key(0)
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.same_arity(other)?;
        Ok(Self::from_set(
            self.arity,
            self.orbits.intersection(&other.orbits).cloned().collect(),
        ))
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.same_arity(other)?;
        Ok(Self::from_set(
            self.arity,
            self.orbits.union(&other.orbits).cloned().collect(),
        ))
    }

    pub fn complement(&self) -> Self {
        let all = enumerate_weak_orders(self.arity).expect("arity validated on construction");
        Self::from_set(
            self.arity,
            all.into_iter().filter(|w| !self.orbits.contains(w)).collect(),
        )
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.arity == other.arity && self.orbits.is_subset(&other.orbits)
    }

    fn same_arity(&self, other: &Self) -> Result<()> {
        if self.arity != other.arity {
            return Err(Error::Contract(format!(
                "arity mismatch: {} vs {}",
                self.arity, other.arity
            )));
        }
        Ok(())
    }

    /// The relation `{(t[p0], t[p1], ...) : t ∈ R}`. Positions may repeat or
    /// be omitted, so this covers permutation and projection.
    pub fn reorder(&self, positions: &[usize]) -> Result<Self> {
        if let Some(&p) = positions.iter().find(|&&p| p >= self.arity) {
            return Err(Error::Contract(format!(
                "position {p} out of range for arity {}",
                self.arity
            )));
        }
        Self::new(
            positions.len(),
            self.orbits.iter().map(|o| o.project(positions)),
        )
    }

    /// [`reorder`](Self::reorder) restricted to permutations of the coordinates.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.arity];
        if perm.len() != self.arity || perm.iter().any(|&p| p >= self.arity || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::Contract(format!("{perm:?} is not a permutation")));
        }
        self.reorder(perm)
    }

    /// The relation of all negated tuples.
    pub fn dual(&self) -> Self {
        let mut r = Self::from_set(self.arity, self.orbits.iter().map(WeakOrder::reversed).collect());
        r.name = self.name.as_ref().map(|n| format!("-{n}"));
        r
    }

    pub fn chi(&self) -> BTreeSet<MinTuple> {
        chi(&self.orbits)
    }

    pub fn chi0(&self) -> BTreeSet<MinTuple> {
        chi0(self.arity, &self.orbits)
    }

    /// CNF with one clause per excluded orbit, each clause negating the
    /// complete order description of that orbit.
    pub fn to_cnf(&self) -> OrderCnf {
        let clauses = self
            .complement()
            .orbits
            .iter()
            .map(|w| {
                let mut c: Clause = Vec::new();
                for i in 0..self.arity {
                    for j in i + 1..self.arity {
                        let rel = match w.ranks()[i].cmp(&w.ranks()[j]) {
                            std::cmp::Ordering::Less => Cmp::Lt,
                            std::cmp::Ordering::Equal => Cmp::Eq,
                            std::cmp::Ordering::Greater => Cmp::Gt,
                        };
                        c.push(Literal::new(i, rel.negated(), j));
                    }
                }
                c
            })
            .collect();
        OrderCnf::positional(self.arity, clauses).expect("positional variables")
    }

    /// Disjunction of complete order descriptions, one per orbit.
    pub fn to_dnf(&self) -> OrderFormula {
        if self.arity == 1 {
            return if self.is_empty() {
                OrderFormula::False
            } else {
                OrderFormula::True
            };
        }
        let disjuncts: Vec<OrderFormula> = self
            .orbits
            .iter()
            .map(|w| {
                let mut lits = Vec::new();
                for i in 0..self.arity {
                    for j in i + 1..self.arity {
                        let rel = match w.ranks()[i].cmp(&w.ranks()[j]) {
                            std::cmp::Ordering::Less => Cmp::Lt,
                            std::cmp::Ordering::Equal => Cmp::Eq,
                            std::cmp::Ordering::Greater => Cmp::Gt,
                        };
                        lits.push(OrderFormula::lit(i, rel, j));
                    }
                }
                OrderFormula::And(lits)
            })
            .collect();
        match disjuncts.len() {
            0 => OrderFormula::False,
            _ => OrderFormula::Or(disjuncts),
        }
    }

    pub fn display_orbits(&self) -> String {
        let parts: Vec<String> = self.orbits.iter().map(|o| o.to_string()).collect();
        format!("{{{}}}", parts.join(","))
    }
}

/// Orbits of all weak orders satisfying the CNF, with the default arity cap.
pub fn relation_from_cnf(formula: &OrderCnf) -> Result<TemporalRelation> {
    relation_from_cnf_with(formula, DEFAULT_ARITY_CAP)
}

pub fn relation_from_cnf_with(formula: &OrderCnf, arity_cap: usize) -> Result<TemporalRelation> {
    let arity = formula.arity();
    if arity > arity_cap {
        return Err(Error::ArityCap {
            arity,
            cap: arity_cap,
        });
    }
    if formula.has_bottom() {
        return TemporalRelation::empty(arity);
    }
    TemporalRelation::from_predicate(arity, |r| formula.eval(r))
}

/// Orbits of all weak orders satisfying an arbitrary order formula.
pub fn relation_from_formula(arity: usize, formula: &OrderFormula, arity_cap: usize) -> Result<TemporalRelation> {
    if arity > arity_cap {
        return Err(Error::ArityCap {
            arity,
            cap: arity_cap,
        });
    }
    if let Some(m) = formula.max_var() {
        if m >= arity {
            return Err(Error::Contract(format!(
                "formula mentions x{} in a relation of arity {arity}",
                m + 1
            )));
        }
    }
    TemporalRelation::from_predicate(arity, |r| formula.eval(r))
}

/// Definitions of the fixed-arity library relations.
const LIBRARY: &[(&str, usize, &str)] = &[
    ("Rmix", 3, "x1 = x2 | (x3 < x1 & x3 < x2)"),
    ("Rmi", 3, "x1 >= x2 | x1 > x3"),
    ("Rmin_le", 3, "x1 >= x2 | x1 >= x3"),
    ("Smi", 3, "x1 != x2 | x1 >= x3"),
    ("Betw", 3, "(x1 < x2 & x2 < x3) | (x3 < x2 & x2 < x1)"),
    (
        "Cycl",
        3,
        "(x1 < x2 & x2 < x3) | (x2 < x3 & x3 < x1) | (x3 < x1 & x1 < x2)",
    ),
    (
        "Sep",
        4,
        "(x1 < x3 & x3 < x2 & x2 < x4) | (x2 < x3 & x3 < x1 & x1 < x4) \
         | (x1 < x4 & x4 < x2 & x2 < x3) | (x2 < x4 & x4 < x1 & x1 < x3)",
    ),
    (
        "X",
        3,
        "(x1 = x2 & x2 < x3) | (x1 = x3 & x3 < x2) | (x2 = x3 & x3 < x1)",
    ),
    ("T3", 3, "(x1 = x2 & x2 < x3) | (x1 = x3 & x3 < x2)"),
    ("Lt", 2, "x1 < x2"),
    ("Le", 2, "x1 <= x2"),
    ("Eq", 2, "x1 = x2"),
    ("Neq", 2, "x1 != x2"),
    ("False", 1, "false"),
];

/// Alternative spellings accepted by [`builtin`].
fn canonical_builtin_name(name: &str) -> &str {
    match name {
        "<" => "Lt",
        "<=" | "≤" => "Le",
        "=" => "Eq",
        "!=" | "≠" => "Neq",
        "FALSE" | "Bottom" => "False",
        other => other,
    }
}

fn library() -> &'static BTreeMap<&'static str, TemporalRelation> {
    static CACHE: OnceLock<BTreeMap<&'static str, TemporalRelation>> = OnceLock::new();
    CACHE.get_or_init(|| {
        LIBRARY
            .iter()
            .map(|&(name, arity, src)| {
                let f = parse_order_formula(src, &positional_names(arity))
                    .expect("library definitions parse");
                let rel = relation_from_formula(arity, &f, arity)
                    .expect("library arities are small")
                    .with_name(name);
                (name, rel)
            })
            .collect()
    })
}

/// Names of the fixed-arity library relations.
pub fn builtin_names() -> Vec<&'static str> {
    LIBRARY.iter().map(|&(n, _, _)| n).collect()
}

/// Looks up a library relation. `RmixN` (for example `Rmix5`) yields the
/// n-ary generalization.
pub fn builtin(name: &str) -> Result<TemporalRelation> {
    let canon = canonical_builtin_name(name);
    if let Some(r) = library().get(canon) {
        return Ok(r.clone());
    }
    if let Some(n) = canon.strip_prefix("Rmix").and_then(|s| s.parse::<usize>().ok()) {
        return rmix_n_relation(n, DEFAULT_ARITY_CAP);
    }
    Err(Error::UnknownRelation(name.to_string()))
}

/// CNF of the n-ary mix relation: two clauses, one headed by each of the
/// first two coordinates.
pub fn rmix_n_cnf(n: usize) -> Result<OrderCnf> {
    if n < 3 {
        return Err(Error::InvalidArity(n));
    }
    let clause = |head: usize, other: usize| -> Clause {
        let mut c = vec![Literal::new(head, Cmp::Ge, other)];
        c.extend((2..n).map(|i| Literal::new(head, Cmp::Gt, i)));
        c
    };
    OrderCnf::positional(n, vec![clause(0, 1), clause(1, 0)])
}

pub fn rmix_n_relation(n: usize, arity_cap: usize) -> Result<TemporalRelation> {
    let cnf = rmix_n_cnf(n)?;
    Ok(relation_from_cnf_with(&cnf, arity_cap)?.with_name(if n == 3 {
        "Rmix".to_string()
    } else {
        format!("Rmix{n}")
    }))
}
