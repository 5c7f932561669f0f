//! The canonical binary operations on Q, described by the weak order they
//! induce on pairs, and exact preservation tests over orbit sets.
//!
//! Whether an operation maps two tuples into a relation depends only on the
//! joint order type of the values involved (plus, for `ll` and `pp`, on the
//! position of the threshold 0 among the first-argument values). A
//! preservation test therefore enumerates pairs of orbits together with all
//! ways of interleaving their value blocks.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::order::{enumerate_weak_orders, WeakOrder};
use crate::relation::TemporalRelation;
use crate::structure::TemporalStructure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OpKind {
    Min,
    Mi,
    Mx,
    Mix,
    Ll,
    Lex,
    Pp,
    /// Projection to the first argument.
    Pr1,
    /// Projection to the second argument.
    Pr2,
}

impl OpKind {
    pub fn name(self) -> &'static str {
        match self {
            OpKind::Min => "min",
            OpKind::Mi => "mi",
            OpKind::Mx => "mx",
            OpKind::Mix => "mix",
            OpKind::Ll => "ll",
            OpKind::Lex => "lex",
            OpKind::Pp => "pp",
            OpKind::Pr1 => "pr1",
            OpKind::Pr2 => "pr2",
        }
    }

    /// Whether the operation's behavior depends on the sign of its first argument.
    pub fn needs_marker(self) -> bool {
        matches!(self, OpKind::Ll | OpKind::Pp)
    }

    /// Whether the comparator ever compares a first argument with a second one.
    fn mixes_arguments(self) -> bool {
        matches!(self, OpKind::Min | OpKind::Mi | OpKind::Mx | OpKind::Mix)
    }

    /// Lexicographic key of `op(x, y)`; `nonpos` says whether `x ≤ 0`.
    fn key(self, x: i32, y: i32, nonpos: bool) -> (i32, i32, i32) {
        match self {
            OpKind::Min => (x.min(y), 0, 0),
            OpKind::Mi => match x.cmp(&y) {
                Ordering::Equal => (x, 0, 0),
                Ordering::Greater => (y, 1, 0),
                Ordering::Less => (x, 2, 0),
            },
            OpKind::Mx => {
                if x == y {
                    (x, 1, 0)
                } else {
                    (x.min(y), 0, 0)
                }
            }
            OpKind::Mix => match x.cmp(&y) {
                Ordering::Greater => (y, 0, 0),
                Ordering::Less => (x, 1, 0),
                Ordering::Equal => (x, 2, 0),
            },
            OpKind::Ll => {
                if nonpos {
                    (0, x, y)
                } else {
                    (1, y, x)
                }
            }
            OpKind::Lex => (x, y, 0),
            OpKind::Pp => {
                if nonpos {
                    (0, x, 0)
                } else {
                    (1, y, 0)
                }
            }
            OpKind::Pr1 => (x, 0, 0),
            OpKind::Pr2 => (y, 0, 0),
        }
    }
}

/// A canonical operation or its dual `(x, y) ↦ −f(−x, −y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OpSpec {
    pub kind: OpKind,
    pub dual: bool,
}

impl OpSpec {
    pub const MIN: OpSpec = OpSpec::base(OpKind::Min);
    pub const MI: OpSpec = OpSpec::base(OpKind::Mi);
    pub const MX: OpSpec = OpSpec::base(OpKind::Mx);
    pub const MIX: OpSpec = OpSpec::base(OpKind::Mix);
    pub const LL: OpSpec = OpSpec::base(OpKind::Ll);
    pub const LEX: OpSpec = OpSpec::base(OpKind::Lex);
    pub const PP: OpSpec = OpSpec::base(OpKind::Pp);

    pub const fn base(kind: OpKind) -> Self {
        OpSpec { kind, dual: false }
    }

    pub const fn dual_of(kind: OpKind) -> Self {
        OpSpec { kind, dual: true }
    }

    pub fn dual(self) -> Self {
        OpSpec {
            kind: self.kind,
            dual: !self.dual,
        }
    }

    pub fn needs_marker(self) -> bool {
        self.kind.needs_marker()
    }

    /// The eight operations of the temporal tractability classification.
    pub fn tractable_ops() -> [OpSpec; 8] {
        use OpKind::*;
        [
            OpSpec::base(Min),
            OpSpec::base(Mi),
            OpSpec::base(Mx),
            OpSpec::base(Ll),
            OpSpec::dual_of(Min),
            OpSpec::dual_of(Mi),
            OpSpec::dual_of(Mx),
            OpSpec::dual_of(Ll),
        ]
    }

    /// Key of the image of `(x, y)`, negating inputs for duals. Keys of a
    /// dual operation compare in reverse.
    fn key(self, x: i32, y: i32, marker: i32) -> (i32, i32, i32) {
        if self.dual {
            self.kind.key(-x, -y, -x <= -marker)
        } else {
            self.kind.key(x, y, x <= marker)
        }
    }
}

impl fmt::Display for OpSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dual {
            match self.kind {
                OpKind::Ll => write!(f, "dll"),
                OpKind::Pp => write!(f, "dpp"),
                k => write!(f, "dual-{}", k.name()),
            }
        } else {
            write!(f, "{}", self.kind.name())
        }
    }
}

impl FromStr for OpSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (dual, rest) = if let Some(r) = s.strip_prefix("dual-") {
            (true, r)
        } else if s == "dll" || s == "dpp" || s == "dmin" || s == "dmi" || s == "dmx" || s == "dmix" {
            (true, &s[1..])
        } else {
            (false, s)
        };
        let kind = match rest {
            "min" => OpKind::Min,
            "mi" => OpKind::Mi,
            "mx" => OpKind::Mx,
            "mix" => OpKind::Mix,
            "ll" => OpKind::Ll,
            "lex" => OpKind::Lex,
            "pp" => OpKind::Pp,
            "pr1" => OpKind::Pr1,
            "pr2" => OpKind::Pr2,
            _ => return Err(Error::Contract(format!("unknown operation `{s}`"))),
        };
        Ok(OpSpec { kind, dual })
    }
}

/// Compares `op(p)` with `op(q)`. `marker` is the value playing the role of
/// 0 and must be given exactly for `ll`, `pp`, and their duals.
pub fn compare(op: OpSpec, p: (i32, i32), q: (i32, i32), marker: Option<i32>) -> Result<Ordering> {
    let z = match (op.needs_marker(), marker) {
        (true, Some(z)) => z,
        (false, None) => 0,
        (true, None) => return Err(Error::Contract(format!("{op} requires a sign-threshold marker"))),
        (false, Some(_)) => return Err(Error::Contract(format!("{op} takes no marker"))),
    };
    let ord = op.key(p.0, p.1, z).cmp(&op.key(q.0, q.1, z));
    Ok(if op.dual { ord.reverse() } else { ord })
}

/// A joint placement of the value blocks of two orbits (and possibly the
/// threshold marker) on a common line.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interleaving {
    /// Position of each block of the first orbit, strictly increasing.
    pub s_vals: Vec<i32>,
    /// Position of each block of the second orbit, strictly increasing.
    pub t_vals: Vec<i32>,
    /// Position of the threshold marker, if present.
    pub marker: Option<i32>,
}

impl Interleaving {
    /// Reads an interleaving from a weak order on `[s-blocks, t-blocks,
    /// marker?]`.
    pub fn from_weak_order(s_blocks: usize, t_blocks: usize, with_marker: bool, w: &WeakOrder) -> Result<Self> {
        let expected = s_blocks + t_blocks + with_marker as usize;
        if w.len() != expected {
            return Err(Error::Contract(format!(
                "interleaving has {} points, expected {expected}",
                w.len()
            )));
        }
        let r: Vec<i32> = w.ranks().iter().map(|&x| x as i32).collect();
        let it = Interleaving {
            s_vals: r[..s_blocks].to_vec(),
            t_vals: r[s_blocks..s_blocks + t_blocks].to_vec(),
            marker: with_marker.then(|| r[expected - 1]),
        };
        it.validate(s_blocks, t_blocks, with_marker)?;
        Ok(it)
    }

    fn validate(&self, s_blocks: usize, t_blocks: usize, with_marker: bool) -> Result<()> {
        let increasing = |v: &[i32]| v.windows(2).all(|w| w[0] < w[1]);
        if self.s_vals.len() != s_blocks || self.t_vals.len() != t_blocks {
            return Err(Error::Contract("interleaving block counts do not match the orbits".into()));
        }
        if !increasing(&self.s_vals) || !increasing(&self.t_vals) {
            return Err(Error::Contract(
                "interleaving is inconsistent with the order of the orbits' blocks".into(),
            ));
        }
        if self.marker.is_some() != with_marker {
            return Err(Error::Contract("marker presence does not match the operation".into()));
        }
        Ok(())
    }
}

/// The orbit of `op(s, t)` applied componentwise under a given interleaving.
pub fn apply_binary(op: OpSpec, s: &WeakOrder, t: &WeakOrder, il: &Interleaving) -> Result<WeakOrder> {
    if s.len() != t.len() {
        return Err(Error::Contract(format!(
            "operands have lengths {} and {}",
            s.len(),
            t.len()
        )));
    }
    il.validate(s.blocks(), t.blocks(), op.needs_marker())?;
    Ok(image(op, s.ranks(), t.ranks(), &il.s_vals, &il.t_vals, il.marker.unwrap_or(0)))
}

fn image(op: OpSpec, s: &[u8], t: &[u8], sv: &[i32], tv: &[i32], marker: i32) -> WeakOrder {
    let keys: SmallVec<[(i32, i32, i32); 12]> = s
        .iter()
        .zip(t)
        .map(|(&a, &b)| op.key(sv[a as usize], tv[b as usize], marker))
        .collect();
    let w = WeakOrder::from_values(&keys);
    if op.dual {
        w.reversed()
    } else {
        w
    }
}

type Merge = (SmallVec<[i32; 8]>, SmallVec<[i32; 8]>);

/// All interleavings of `a` and `b` strictly increasing blocks, where a
/// block of one side may coincide with a block of the other.
fn merges(a: usize, b: usize) -> Vec<Merge> {
    fn go(a: usize, b: usize, i: usize, j: usize, next: i32, cur: &mut Merge, out: &mut Vec<Merge>) {
        if i == a && j == b {
            out.push(cur.clone());
            return;
        }
        if i < a {
            cur.0.push(next);
            go(a, b, i + 1, j, next + 1, cur, out);
            cur.0.pop();
        }
        if j < b {
            cur.1.push(next);
            go(a, b, i, j + 1, next + 1, cur, out);
            cur.1.pop();
        }
        if i < a && j < b {
            cur.0.push(next);
            cur.1.push(next);
            go(a, b, i + 1, j + 1, next + 1, cur, out);
            cur.0.pop();
            cur.1.pop();
        }
    }
    let mut out = Vec::new();
    go(a, b, 0, 0, 0, &mut (SmallVec::new(), SmallVec::new()), &mut out);
    out
}

/// Interleavings that matter for `op`: all merges for operations comparing
/// first with second arguments, otherwise a single one.
fn relevant_merges(op: OpSpec, a: usize, b: usize) -> Vec<Merge> {
    if op.kind.mixes_arguments() {
        merges(a, b)
    } else {
        vec![((0..a as i32).collect(), (a as i32..(a + b) as i32).collect())]
    }
}

/// Marker positions: below all first-argument blocks, equal to each, and
/// strictly above each. Values are doubled so that gaps are available.
fn marker_positions(op: OpSpec, sv: &[i32]) -> SmallVec<[i32; 9]> {
    if !op.needs_marker() {
        return SmallVec::from_slice(&[0]);
    }
    let mut out = SmallVec::new();
    out.push(-1);
    for &v in sv {
        out.push(2 * v);
        out.push(2 * v + 1);
    }
    out
}

/// A pair of orbits, an interleaving, and the resulting image orbit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreservationWitness {
    pub s: WeakOrder,
    pub t: WeakOrder,
    pub interleaving: Interleaving,
    pub image: WeakOrder,
}

impl fmt::Display for PreservationWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} , {} ↦ {}", self.s, self.t, self.image)
    }
}

/// Calls `visit` on every image of the pair under every relevant
/// interleaving until it returns `true`.
fn for_each_image(
    op: OpSpec,
    s: &WeakOrder,
    t: &WeakOrder,
    cache: &mut HashMap<(usize, usize), Vec<Merge>>,
    mut visit: impl FnMut(WeakOrder, &Merge, i32) -> bool,
) -> bool {
    let (a, b) = (s.blocks(), t.blocks());
    let ms = cache.entry((a, b)).or_insert_with(|| relevant_merges(op, a, b));
    for m in ms.iter() {
        let doubled: SmallVec<[i32; 8]>;
        let (sv, tv): (&[i32], &[i32]) = if op.needs_marker() {
            doubled = m.0.iter().chain(&m.1).map(|v| 2 * v).collect();
            (&doubled[..a], &doubled[a..])
        } else {
            (&m.0, &m.1)
        };
        for z in marker_positions(op, &m.0) {
            let w = image(op, s.ranks(), t.ranks(), sv, tv, z);
            if visit(w, m, z) {
                return true;
            }
        }
    }
    false
}

fn witness_for(op: OpSpec, s: &WeakOrder, t: &WeakOrder, m: &Merge, z: i32, image: WeakOrder) -> PreservationWitness {
    let scale = if op.needs_marker() { 2 } else { 1 };
    PreservationWitness {
        s: s.clone(),
        t: t.clone(),
        interleaving: Interleaving {
            s_vals: m.0.iter().map(|v| v * scale).collect(),
            t_vals: m.1.iter().map(|v| v * scale).collect(),
            marker: op.needs_marker().then_some(z),
        },
        image,
    }
}

/// A pair of orbits of `r` whose image under `op` leaves `r`, if any.
pub fn preservation_counterexample(op: OpSpec, r: &TemporalRelation) -> Option<PreservationWitness> {
    let orbits: Vec<&WeakOrder> = r.orbits().iter().collect();
    // Parallel over the first orbit; the lowest-index counterexample is
    // reported so that the result does not depend on scheduling.
    orbits
        .par_iter()
        .enumerate()
        .filter_map(|(i, s)| {
            let mut cache = HashMap::new();
            for t in &orbits {
                let mut found = None;
                for_each_image(op, s, t, &mut cache, |w, m, z| {
                    if r.contains(&w) {
                        false
                    } else {
                        found = Some(witness_for(op, s, t, m, z, w));
                        true
                    }
                });
                if let Some(wit) = found {
                    return Some((i, wit));
                }
            }
            None
        })
        .min_by_key(|(i, _)| *i)
        .map(|(_, w)| w)
}

/// Whether `op` maps every pair of tuples of `r` into `r`.
pub fn preserves(op: OpSpec, r: &TemporalRelation) -> bool {
    preservation_counterexample(op, r).is_none()
}

/// Every image orbit of a pair of orbits under `op`.
pub fn images(op: OpSpec, s: &WeakOrder, t: &WeakOrder) -> Vec<WeakOrder> {
    let mut out = Vec::new();
    let mut cache = HashMap::new();
    for_each_image(op, s, t, &mut cache, |w, _, _| {
        out.push(w);
        false
    });
    out.sort();
    out.dedup();
    out
}

/// First relation of `a` not preserved by `op`, with a counterexample.
pub fn structure_counterexample(op: OpSpec, a: &TemporalStructure) -> Option<(String, PreservationWitness)> {
    a.relations()
        .iter()
        .find_map(|(sym, r)| preservation_counterexample(op, r).map(|w| (sym.clone(), w)))
}

pub fn preserves_structure(op: OpSpec, a: &TemporalStructure) -> bool {
    structure_counterexample(op, a).is_none()
}

/// Whether membership depends only on which coordinates are equal.
pub fn preserved_by_all_permutations(r: &TemporalRelation) -> bool {
    r.orbits().iter().all(|o| {
        let k = o.blocks();
        let mut perm: Vec<u8> = (0..k as u8).collect();
        loop {
            let ranks: SmallVec<[u8; 12]> = o.ranks().iter().map(|&x| perm[x as usize]).collect();
            if !r.contains(&WeakOrder::from_ranks_unchecked(ranks)) {
                return false;
            }
            if !next_permutation(&mut perm) {
                return true;
            }
        }
    })
}

fn next_permutation(p: &mut [u8]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

pub fn structure_preserved_by_all_permutations(a: &TemporalStructure) -> bool {
    a.relations().iter().all(|(_, r)| preserved_by_all_permutations(r))
}

/// Whether a constant operation is a polymorphism: every non-empty
/// relation contains the constant tuples.
pub fn has_constant_polymorphism(a: &TemporalStructure) -> bool {
    a.relations()
        .iter()
        .all(|(_, r)| r.is_empty() || r.contains_constant())
}

/// Precomputed images of all orbit pairs of a fixed small arity, for fast
/// preservation tests of many relations given as bitsets over
/// `enumerate_weak_orders(arity)`.
pub struct ClosureTable {
    op: OpSpec,
    arity: usize,
    orbits: Vec<WeakOrder>,
    /// `table[i * n + j]` is the bitset of images of orbit pair (i, j).
    table: Vec<u128>,
}

impl ClosureTable {
    pub const MAX_ARITY: usize = 4;

    pub fn new(op: OpSpec, arity: usize) -> Result<Self> {
        if arity == 0 || arity > Self::MAX_ARITY {
            return Err(Error::ArityCap {
                arity,
                cap: Self::MAX_ARITY,
            });
        }
        let orbits = enumerate_weak_orders(arity)?;
        let index: HashMap<u64, usize> = orbits.iter().enumerate().map(|(i, o)| (o.key(), i)).collect();
        let n = orbits.len();
        let table = (0..n * n)
            .into_par_iter()
            .map(|ij| {
                let mut bits = 0u128;
                for w in images(op, &orbits[ij / n], &orbits[ij % n]) {
                    bits |= 1 << index[&w.key()];
                }
                bits
            })
            .collect();
        Ok(ClosureTable {
            op,
            arity,
            orbits,
            table,
        })
    }

    pub fn op(&self) -> OpSpec {
        self.op
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn orbits(&self) -> &[WeakOrder] {
        &self.orbits
    }

    /// Bitset of a relation of this table's arity.
    pub fn bits_of(&self, r: &TemporalRelation) -> u128 {
        self.orbits
            .iter()
            .enumerate()
            .filter(|(_, o)| r.contains(o))
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }

    pub fn relation_of(&self, bits: u128) -> TemporalRelation {
        let orbits = (0..self.orbits.len())
            .filter(|i| bits >> i & 1 == 1)
            .map(|i| self.orbits[i].clone());
        TemporalRelation::new(self.arity, orbits).expect("orbits of the table arity")
    }

    pub fn preserves_bits(&self, bits: u128) -> bool {
        let n = self.orbits.len();
        let outside = !bits;
        let mut rest = bits;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let mut inner = bits;
            while inner != 0 {
                let j = inner.trailing_zeros() as usize;
                inner &= inner - 1;
                if self.table[i * n + j] & outside != 0 {
                    return false;
                }
            }
        }
        true
    }
}

/// The concrete realization of `mix` on non-negative integers with
/// `γ(x) = 3x`, `α(x) = 3x + 1`, `β(x) = 3x + 2`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ConcreteMixTable;

impl ConcreteMixTable {
    pub fn apply(&self, x: u64, y: u64) -> u64 {
        match x.cmp(&y) {
            Ordering::Less => 3 * x + 1,
            Ordering::Equal => 3 * x + 2,
            Ordering::Greater => 3 * y,
        }
    }

    /// Values on `{0,..,3}²`, indexed `[x][y]`.
    pub fn grid(&self) -> [[u64; 4]; 4] {
        let mut g = [[0; 4]; 4];
        for (x, row) in g.iter_mut().enumerate() {
            for (y, v) in row.iter_mut().enumerate() {
                *v = self.apply(x as u64, y as u64);
            }
        }
        g
    }
}

/// Whether `f(x, y) = mix(mix(x, y), 3y)` orders `{0,..,3}²` exactly as `mi` does.
pub fn mi_from_mix_grid_check() -> bool {
    let mix = ConcreteMixTable;
    let f = |x: u64, y: u64| mix.apply(mix.apply(x, y), 3 * y);
    let points: Vec<(u64, u64)> = (0..4).flat_map(|x| (0..4).map(move |y| (x, y))).collect();
    points.iter().all(|&p| {
        points.iter().all(|&q| {
            let ours = f(p.0, p.1).cmp(&f(q.0, q.1));
            let mi = compare(
                OpSpec::MI,
                (p.0 as i32, p.1 as i32),
                (q.0 as i32, q.1 as i32),
                None,
            )
            .expect("mi takes no marker");
            ours == mi
        })
    })
}
