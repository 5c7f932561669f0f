//! Linear algebra over GF(2) on min-indicator vectors.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::order::MinTuple;
use crate::relation::TemporalRelation;

/// A subspace of GF(2)^n given by a reduced row echelon basis, together
/// with a homogeneous system `A x = 0` whose solution space it is.
/// Vectors are bitmasks; bit i is coordinate i.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GF2System {
    n: usize,
    basis: Vec<u32>,
    equations: Vec<u32>,
}

/// Reduced row echelon form; the pivot of a row is its lowest set bit.
pub fn rref(vectors: impl IntoIterator<Item = u32>) -> Vec<u32> {
    let mut rows: Vec<u32> = Vec::new();
    for mut v in vectors {
        for &r in &rows {
            if v >> r.trailing_zeros() & 1 == 1 {
                v ^= r;
            }
        }
        if v == 0 {
            continue;
        }
        let p = v.trailing_zeros();
        for r in rows.iter_mut() {
            if *r >> p & 1 == 1 {
                *r ^= v;
            }
        }
        rows.push(v);
    }
    rows.sort_by_key(|r| r.trailing_zeros());
    rows
}

impl GF2System {
    /// The span of `vectors` in GF(2)^n.
    pub fn span(n: usize, vectors: impl IntoIterator<Item = u32>) -> Self {
        let basis = rref(vectors);
        let pivots: u32 = basis.iter().fold(0, |acc, r| acc | 1 << r.trailing_zeros());
        // The annihilator has one generator per non-pivot column f: the
        // unit vector at f plus, for each basis row, its bit at f placed at
        // that row's pivot.
        let equations = rref((0..n as u32).filter(|f| pivots >> f & 1 == 0).map(|f| {
            basis
                .iter()
                .fold(1 << f, |acc, r| acc | ((r >> f & 1) << r.trailing_zeros()))
        }));
        GF2System { n, basis, equations }
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &[u32] {
        &self.basis
    }

    /// Rows of `A`, in reduced row echelon form.
    pub fn equations(&self) -> &[u32] {
        &self.equations
    }

    pub fn contains(&self, v: u32) -> bool {
        self.equations.iter().all(|e| (e & v).count_ones().is_multiple_of(2))
    }

    /// All vectors of the space, ascending.
    pub fn solutions(&self) -> Vec<u32> {
        let mut out: Vec<u32> = (0u32..1 << self.basis.len())
            .map(|c| {
                self.basis
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| c >> i & 1 == 1)
                    .fold(0, |acc, (_, r)| acc ^ r)
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn solution_tuples(&self) -> BTreeSet<MinTuple> {
        self.solutions()
            .into_iter()
            .map(|v| MinTuple::from_bits(&(0..self.n).map(|i| v >> i & 1 == 1).collect::<Vec<_>>()))
            .collect()
    }

    /// Human-readable equations such as `x1 + x2 = 0`.
    pub fn equation_strings(&self) -> Vec<String> {
        self.equations
            .iter()
            .map(|e| {
                let terms: Vec<String> = (0..self.n).filter(|i| e >> i & 1 == 1).map(|i| format!("x{}", i + 1)).collect();
                format!("{} = 0", terms.join(" + "))
            })
            .collect()
    }
}

impl fmt::Display for GF2System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.equations.is_empty() {
            return write!(f, "0 = 0");
        }
        write!(f, "{}", self.equation_strings().join(", "))
    }
}

/// Result of asking for a linear description of χ0(R).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Chi0System {
    Linear(GF2System),
    /// Two members of χ0(R) whose sum lies outside it.
    NotLinear { a: MinTuple, b: MinTuple },
}

/// The GF(2) system with solution space χ0(R), if χ0(R) is a subspace.
pub fn chi0_system(r: &TemporalRelation) -> Chi0System {
    let n = r.arity();
    let chi0 = r.chi0();
    let masks: BTreeSet<u32> = chi0.iter().map(MinTuple::mask).collect();
    for a in &chi0 {
        for b in &chi0 {
            if !masks.contains(&(a.mask() ^ b.mask())) {
                return Chi0System::NotLinear { a: *a, b: *b };
            }
        }
    }
    Chi0System::Linear(GF2System::span(n, masks))
}
