//! Finite-signature temporal structures and resource caps.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relation::{builtin, TemporalRelation, DEFAULT_ARITY_CAP};

/// Resource limits shared by the enumeration-based algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Largest relation arity accepted.
    pub arity: usize,
    /// Largest number of variables the exact solvers accept.
    pub oracle_vars: usize,
    /// Largest number of variables (free plus bound) in a pp-formula.
    pub pp_vars: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            arity: DEFAULT_ARITY_CAP,
            oracle_vars: 8,
            pp_vars: 12,
        }
    }
}

/// A structure over the rationals with finitely many named temporal relations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemporalStructure {
    name: String,
    relations: Vec<(String, TemporalRelation)>,
}

fn equality() -> &'static TemporalRelation {
    static EQ: OnceLock<TemporalRelation> = OnceLock::new();
    EQ.get_or_init(|| builtin("=").expect("library relation"))
}

impl TemporalStructure {
    pub fn new(name: impl Into<String>) -> Self {
        TemporalStructure {
            name: name.into(),
            relations: Vec::new(),
        }
    }

    /// Structure whose symbols are library relation names, e.g. `["<", "Rmix"]`.
    pub fn from_builtins(name: impl Into<String>, symbols: &[&str]) -> Result<Self> {
        let mut s = Self::new(name);
        for sym in symbols {
            s.add(*sym, builtin(sym)?)?;
        }
        Ok(s)
    }

    pub fn with(mut self, symbol: impl Into<String>, rel: TemporalRelation) -> Result<Self> {
        self.add(symbol, rel)?;
        Ok(self)
    }

    pub fn add(&mut self, symbol: impl Into<String>, rel: TemporalRelation) -> Result<()> {
        let symbol = symbol.into();
        if symbol == "=" {
            return Err(Error::Signature("`=` is reserved for equality".into()));
        }
        if self.relations.iter().any(|(s, _)| *s == symbol) {
            return Err(Error::Signature(format!("duplicate relation symbol `{symbol}`")));
        }
        self.relations.push((symbol, rel));
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn relations(&self) -> &[(String, TemporalRelation)] {
        &self.relations
    }

    pub fn symbols(&self) -> impl Iterator<Item = &str> {
        self.relations.iter().map(|(s, _)| s.as_str())
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn get(&self, symbol: &str) -> Option<&TemporalRelation> {
        self.relations.iter().find(|(s, _)| s == symbol).map(|(_, r)| r)
    }

    /// Resolves a symbol; `=` always denotes equality.
    pub fn lookup(&self, symbol: &str) -> Result<&TemporalRelation> {
        if symbol == "=" {
            return Ok(equality());
        }
        self.get(symbol)
            .ok_or_else(|| Error::Signature(format!("unknown relation symbol `{symbol}` in structure `{}`", self.name)))
    }

    pub fn max_arity(&self) -> usize {
        self.relations.iter().map(|(_, r)| r.arity()).max().unwrap_or(0)
    }

    pub fn check_caps(&self, caps: &Caps) -> Result<()> {
        let a = self.max_arity();
        if a > caps.arity {
            return Err(Error::ArityCap {
                arity: a,
                cap: caps.arity,
            });
        }
        Ok(())
    }

    /// The structure with every relation replaced by its dual.
    pub fn dual(&self) -> Self {
        TemporalStructure {
            name: format!("-{}", self.name),
            relations: self
                .relations
                .iter()
                .map(|(s, r)| (s.clone(), r.dual()))
                .collect(),
        }
    }

    /// Union of the relation lists with symbols prefixed by their origin.
    pub fn disjoint_union(name: impl Into<String>, a: &Self, b: &Self) -> Self {
        let mut out = Self::new(name);
        for (src, tag) in [(a, "1"), (b, "2")] {
            let prefix = if a.name != b.name && !src.name.is_empty() {
                src.name.clone()
            } else {
                format!("{}{tag}", src.name)
            };
            for (s, r) in &src.relations {
                out.relations.push((format!("{prefix}.{s}"), r.clone()));
            }
        }
        out
    }
}
