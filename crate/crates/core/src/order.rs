//! Orbits of tuples under order automorphisms of the rationals.
//!
//! Two tuples of rationals lie in the same orbit exactly when they agree on
//! which coordinates are equal and how the coordinates are ordered. An orbit
//! is therefore a weak order on the coordinate positions, stored here as a
//! dense rank vector: rank 0 is the smallest block and the ranks cover
//! `0..k` without gaps.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Hard limit imposed by the packed `u64` orbit keys (4 bits per coordinate).
pub const MAX_POINTS: usize = 16;

pub(crate) type Ranks = SmallVec<[u8; 12]>;

/// Canonical rank vector of one orbit of n-tuples.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "Vec<u8>", try_from = "Vec<u8>")]
pub struct WeakOrder {
    ranks: Ranks,
}

impl WeakOrder {
    /// Validates that `ranks` is dense and non-empty.
    pub fn new(ranks: &[u8]) -> Result<Self> {
        if ranks.is_empty() || ranks.len() > MAX_POINTS {
            return Err(Error::InvalidArity(ranks.len()));
        }
        let max = *ranks.iter().max().unwrap() as usize;
        let mut seen = [false; MAX_POINTS];
        for &r in ranks {
            seen[r as usize] = true;
        }
        if seen[..=max].iter().any(|s| !s) {
            return Err(Error::Contract(format!(
                "rank vector {ranks:?} is not contiguous"
            )));
        }
        Ok(WeakOrder {
            ranks: Ranks::from_slice(ranks),
        })
    }

    /// Canonicalizes an arbitrary sequence of comparable values.
    pub fn from_values<T: Ord>(values: &[T]) -> Self {
        let mut sorted: Vec<&T> = values.iter().collect();
        sorted.sort();
        sorted.dedup();
        let ranks = values
            .iter()
            .map(|v| sorted.binary_search(&v).unwrap() as u8)
            .collect();
        WeakOrder { ranks }
    }

    pub(crate) fn from_ranks_unchecked(ranks: Ranks) -> Self {
        debug_assert!(WeakOrder::new(&ranks).is_ok());
        WeakOrder { ranks }
    }

    pub fn ranks(&self) -> &[u8] {
        &self.ranks
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    /// Number of distinct values (blocks).
    pub fn blocks(&self) -> usize {
        self.ranks.iter().max().map_or(0, |&m| m as usize + 1)
    }

    pub fn is_constant(&self) -> bool {
        self.blocks() == 1
    }

    /// Packed key, unique among weak orders of the same length.
    pub fn key(&self) -> u64 {
        pack(&self.ranks)
    }

    /// The orbit of the negated tuple.
    pub fn reversed(&self) -> Self {
        let top = self.blocks() as u8 - 1;
        WeakOrder {
            ranks: self.ranks.iter().map(|&r| top - r).collect(),
        }
    }

    /// Orbit of the subtuple at `positions` (in that order).
    pub fn project(&self, positions: &[usize]) -> Self {
        let vals: Ranks = positions.iter().map(|&i| self.ranks[i]).collect();
        WeakOrder::from_values(&vals)
    }

    /// Equality kernel as first-occurrence labels; two orbits with the same
    /// kernel identify exactly the same coordinates.
    pub fn kernel(&self) -> Vec<u8> {
        let mut label = [u8::MAX; MAX_POINTS];
        let mut next = 0u8;
        self.ranks
            .iter()
            .map(|&r| {
                if label[r as usize] == u8::MAX {
                    label[r as usize] = next;
                    next += 1;
                }
                label[r as usize]
            })
            .collect()
    }

    /// Min-indicator of the orbit: bit i is set iff coordinate i is minimal.
    pub fn min_tuple(&self) -> MinTuple {
        let mut bits = 0u32;
        for (i, &r) in self.ranks.iter().enumerate() {
            if r == 0 {
                bits |= 1 << i;
            }
        }
        MinTuple {
            bits,
            len: self.len() as u8,
        }
    }
}

impl fmt::Debug for WeakOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for WeakOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, r) in self.ranks.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, "]")
    }
}

impl From<WeakOrder> for Vec<u8> {
    fn from(w: WeakOrder) -> Vec<u8> {
        w.ranks.to_vec()
    }
}

impl TryFrom<Vec<u8>> for WeakOrder {
    type Error = Error;
    fn try_from(v: Vec<u8>) -> Result<Self> {
        WeakOrder::new(&v)
    }
}

pub(crate) fn pack(ranks: &[u8]) -> u64 {
    ranks
        .iter()
        .enumerate()
        .fold(0u64, |acc, (i, &r)| acc | ((r as u64) << (4 * i)))
}

/// Canonical packed key of an arbitrary (not necessarily dense) small vector.
pub(crate) fn canonical_key(values: &[u8]) -> u64 {
    let mut present = 0u32;
    for &v in values {
        present |= 1 << v;
    }
    let mut key = 0u64;
    for (i, &v) in values.iter().enumerate() {
        let rank = (present & ((1u32 << v) - 1)).count_ones() as u64;
        key |= rank << (4 * i);
    }
    key
}

/// Orbit of a tuple of values.
pub fn orbit_of<T: Ord>(values: &[T]) -> Result<WeakOrder> {
    if values.is_empty() || values.len() > MAX_POINTS {
        return Err(Error::InvalidArity(values.len()));
    }
    Ok(WeakOrder::from_values(values))
}

/// All weak orders on `n` points, sorted by rank vector.
pub fn enumerate_weak_orders(n: usize) -> Result<Vec<WeakOrder>> {
    if n == 0 || n > MAX_POINTS {
        return Err(Error::InvalidArity(n));
    }
    // Insert points one at a time: the new point either joins one of the k
    // existing blocks or opens a new block in one of the k + 1 gaps.
    let mut current: Vec<Ranks> = vec![Ranks::from_slice(&[0])];
    for _ in 1..n {
        let mut next = Vec::with_capacity(current.len() * 4);
        for ranks in &current {
            let k = ranks.iter().max().unwrap() + 1;
            for b in 0..k {
                let mut r = ranks.clone();
                r.push(b);
                next.push(r);
            }
            for gap in 0..=k {
                let mut r: Ranks = ranks
                    .iter()
                    .map(|&x| if x >= gap { x + 1 } else { x })
                    .collect();
                r.push(gap);
                next.push(r);
            }
        }
        current = next;
    }
    let mut out: Vec<WeakOrder> = current
        .into_iter()
        .map(WeakOrder::from_ranks_unchecked)
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// Boolean vector marking the minimal coordinates of a tuple.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MinTuple {
    bits: u32,
    len: u8,
}

impl MinTuple {
    pub fn from_bits(bits: &[bool]) -> Self {
        let mut b = 0u32;
        for (i, &x) in bits.iter().enumerate() {
            if x {
                b |= 1 << i;
            }
        }
        MinTuple {
            bits: b,
            len: bits.len() as u8,
        }
    }

    pub fn zero(len: usize) -> Self {
        MinTuple {
            bits: 0,
            len: len as u8,
        }
    }

    pub fn mask(&self) -> u32 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits >> i & 1 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..self.len()).map(|i| self.get(i)).collect()
    }
}

impl fmt::Debug for MinTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for i in 0..self.len() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", self.get(i) as u8)?;
        }
        write!(f, ")")
    }
}

/// χ(R): the min-tuples of the orbits of a relation.
pub fn chi<'a>(orbits: impl IntoIterator<Item = &'a WeakOrder>) -> BTreeSet<MinTuple> {
    orbits.into_iter().map(WeakOrder::min_tuple).collect()
}

/// χ0(R) = χ(R) ∪ {0}.
pub fn chi0<'a>(arity: usize, orbits: impl IntoIterator<Item = &'a WeakOrder>) -> BTreeSet<MinTuple> {
    let mut set = chi(orbits);
    set.insert(MinTuple::zero(arity));
    set
}
