//! Primitive positive formulas and their evaluation over temporal structures.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::Cmp;
use crate::order::WeakOrder;
use crate::relation::TemporalRelation;
use crate::search::Csp;
use crate::structure::{Caps, TemporalStructure};

/// A relation symbol applied to variables (indices into the formula's
/// variable list). The symbol `=` denotes equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Atom {
    pub symbol: String,
    pub args: Vec<usize>,
}

impl Atom {
    pub fn new(symbol: impl Into<String>, args: Vec<usize>) -> Self {
        Atom {
            symbol: symbol.into(),
            args,
        }
    }

    pub fn eq(a: usize, b: usize) -> Self {
        Atom::new("=", vec![a, b])
    }
}

/// `∃ bound . atom ∧ ... ∧ atom`. Variables are stored free-first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PPFormula {
    vars: Vec<String>,
    free: usize,
    atoms: Vec<Atom>,
}

impl PPFormula {
    pub fn new(vars: Vec<String>, free: usize, atoms: Vec<Atom>) -> Result<Self> {
        if free > vars.len() {
            return Err(Error::Contract("more free variables than variables".into()));
        }
        let distinct: BTreeSet<&String> = vars.iter().collect();
        if distinct.len() != vars.len() {
            return Err(Error::Contract("duplicate variable name".into()));
        }
        if let Some(a) = atoms.iter().find(|a| a.args.iter().any(|&v| v >= vars.len())) {
            return Err(Error::Contract(format!("atom `{}` refers to an undeclared variable", a.symbol)));
        }
        Ok(PPFormula { vars, free, atoms })
    }

    /// Convenience constructor from string names.
    pub fn build(free: &[&str], bound: &[&str], atoms: &[(&str, &[&str])]) -> Result<Self> {
        let vars: Vec<String> = free.iter().chain(bound).map(|s| s.to_string()).collect();
        let idx = |n: &str| {
            vars.iter()
                .position(|v| v == n)
                .ok_or_else(|| Error::Contract(format!("unknown variable `{n}`")))
        };
        let atoms = atoms
            .iter()
            .map(|(sym, args)| Ok(Atom::new(*sym, args.iter().map(|a| idx(a)).collect::<Result<_>>()?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(vars, free.len(), atoms)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn free_vars(&self) -> &[String] {
        &self.vars[..self.free]
    }

    pub fn bound_vars(&self) -> &[String] {
        &self.vars[self.free..]
    }

    pub fn free_count(&self) -> usize {
        self.free
    }

    pub fn bound_count(&self) -> usize {
        self.vars.len() - self.free
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn symbols(&self) -> BTreeSet<&str> {
        self.atoms.iter().map(|a| a.symbol.as_str()).collect()
    }

    /// Conjunction with extra atoms over the same variables.
    pub fn and_atoms(&self, extra: impl IntoIterator<Item = Atom>) -> Result<Self> {
        let mut atoms = self.atoms.clone();
        atoms.extend(extra);
        Self::new(self.vars.clone(), self.free, atoms)
    }

    /// Renames the free variables, keeping their order.
    pub fn rename_free(&self, names: &[&str]) -> Result<Self> {
        if names.len() != self.free {
            return Err(Error::Contract("wrong number of free variable names".into()));
        }
        let mut vars: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        vars.extend(self.vars[self.free..].iter().cloned());
        Self::new(vars, self.free, self.atoms.clone())
    }

    /// Renames a relation symbol in every atom.
    pub fn rename_symbol(&self, from: &str, to: &str) -> Self {
        let atoms = self
            .atoms
            .iter()
            .map(|a| {
                if a.symbol == from {
                    Atom::new(to, a.args.clone())
                } else {
                    a.clone()
                }
            })
            .collect();
        PPFormula {
            vars: self.vars.clone(),
            free: self.free,
            atoms,
        }
    }

    /// Replaces every atom over `symbol` by the body of `def`, with the
    /// definition's free variables bound to the atom's arguments and its
    /// bound variables renamed apart.
    pub fn substitute(&self, symbol: &str, def: &PPFormula) -> Result<Self> {
        let mut vars = self.vars[..self.free].to_vec();
        let mut bound = self.vars[self.free..].to_vec();
        let mut atoms = Vec::new();
        let mut fresh = 0usize;
        let mut extra_bound: Vec<String> = Vec::new();
        let mut pending: Vec<Atom> = Vec::new();
        for atom in &self.atoms {
            if atom.symbol != symbol {
                pending.push(atom.clone());
                continue;
            }
            if atom.args.len() != def.free {
                return Err(Error::Signature(format!(
                    "`{symbol}` used with {} arguments but defined with {}",
                    atom.args.len(),
                    def.free
                )));
            }
            // Indices into the final variable list are assigned below; use a
            // tagged encoding meanwhile: existing variables keep their index,
            // new ones are offset past the existing variables.
            let mut local = Vec::with_capacity(def.vars.len());
            for (i, name) in def.vars.iter().enumerate() {
                if i < def.free {
                    local.push(atom.args[i]);
                } else {
                    let mut candidate = name.clone();
                    while self.vars.contains(&candidate) || extra_bound.contains(&candidate) {
                        fresh += 1;
                        candidate = format!("{name}{fresh}");
                    }
                    extra_bound.push(candidate);
                    local.push(self.vars.len() + extra_bound.len() - 1);
                }
            }
            for a in &def.atoms {
                pending.push(Atom::new(a.symbol.clone(), a.args.iter().map(|&v| local[v]).collect()));
            }
        }
        atoms.extend(pending);
        bound.extend(extra_bound);
        vars.extend(bound);
        Self::new(vars, self.free, atoms)
    }

    /// ASCII rendering accepted by the formula parser.
    pub fn to_dsl(&self) -> String {
        let body = if self.atoms.is_empty() {
            format!("{0} = {0}", self.vars.first().map_or("x", |s| s.as_str()))
        } else {
            self.atoms
                .iter()
                .map(|a| self.atom_text(a))
                .collect::<Vec<_>>()
                .join(" & ")
        };
        if self.bound_count() == 0 {
            body
        } else {
            format!("exists {} . {body}", self.bound_vars().join(", "))
        }
    }

    fn atom_text(&self, a: &Atom) -> String {
        if a.args.len() == 2 && Cmp::from_symbol(&a.symbol).is_some() {
            return format!("{} {} {}", self.vars[a.args[0]], a.symbol, self.vars[a.args[1]]);
        }
        let args: Vec<&str> = a.args.iter().map(|&v| self.vars[v].as_str()).collect();
        format!("{}({})", a.symbol, args.join(","))
    }
}

impl fmt::Display for PPFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pretty = |a: &Atom| -> String {
            let t = self.atom_text(a);
            t.replace(" <= ", " ≤ ").replace(" >= ", " ≥ ").replace(" != ", " ≠ ")
        };
        let body = if self.atoms.is_empty() {
            "true".to_string()
        } else {
            self.atoms.iter().map(pretty).collect::<Vec<_>>().join(" ∧ ")
        };
        if self.bound_count() == 0 {
            write!(f, "{body}")
        } else if self.atoms.len() == 1 {
            write!(f, "∃{}. {body}", self.bound_vars().join(","))
        } else {
            write!(f, "∃{} ({body})", self.bound_vars().join(","))
        }
    }
}

/// The relation defined by `phi` over `a`, with default caps.
pub fn eval_pp(phi: &PPFormula, a: &TemporalStructure) -> Result<TemporalRelation> {
    eval_pp_with(phi, a, &Caps::default())
}

pub fn eval_pp_with(phi: &PPFormula, a: &TemporalStructure, caps: &Caps) -> Result<TemporalRelation> {
    let n = phi.vars.len();
    if n > caps.pp_vars {
        return Err(Error::Resource {
            what: "pp-formula variables",
            got: n,
            cap: caps.pp_vars,
        });
    }
    if phi.free == 0 {
        return Err(Error::InvalidArity(0));
    }
    let mut cons = Vec::with_capacity(phi.atoms.len());
    for atom in &phi.atoms {
        let rel = a.lookup(&atom.symbol)?;
        if rel.arity() != atom.args.len() {
            return Err(Error::Signature(format!(
                "`{}` has arity {} but is applied to {} arguments",
                atom.symbol,
                rel.arity(),
                atom.args.len()
            )));
        }
        cons.push((atom.args.clone(), rel));
    }
    let csp = Csp::new(n, &cons, phi.free)?;
    let orbits = csp
        .prefix_projections(phi.free)
        .into_iter()
        .map(|r| WeakOrder::new(&r).expect("search yields dense ranks"));
    TemporalRelation::new(phi.free, orbits)
}
