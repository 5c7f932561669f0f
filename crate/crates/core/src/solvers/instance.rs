//! CSP instances over one temporal structure or a pair of them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pp::{eval_pp, PPFormula};
use crate::relation::{builtin, TemporalRelation};
use crate::structure::TemporalStructure;

/// A relation symbol applied to instance variables (by index).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Constraint {
    pub symbol: String,
    pub args: Vec<usize>,
}

impl Constraint {
    pub fn new(symbol: impl Into<String>, args: Vec<usize>) -> Self {
        Constraint {
            symbol: symbol.into(),
            args,
        }
    }
}

fn intern(vars: &mut Vec<String>, name: &str) -> usize {
    match vars.iter().position(|v| v == name) {
        Some(i) => i,
        None => {
            vars.push(name.to_string());
            vars.len() - 1
        }
    }
}

fn check_constraint(a: &TemporalStructure, c: &Constraint, nvars: usize) -> Result<()> {
    let rel = a.lookup(&c.symbol)?;
    if rel.arity() != c.args.len() {
        return Err(Error::Signature(format!(
            "`{}` has arity {} but is applied to {} arguments",
            c.symbol,
            rel.arity(),
            c.args.len()
        )));
    }
    if let Some(v) = c.args.iter().find(|&&v| v >= nvars) {
        return Err(Error::Contract(format!("variable index {v} out of range")));
    }
    Ok(())
}

fn resolve<'a>(a: &'a TemporalStructure, cons: &[Constraint]) -> Result<Vec<(Vec<usize>, &'a TemporalRelation)>> {
    cons.iter()
        .map(|c| Ok((c.args.clone(), a.lookup(&c.symbol)?)))
        .collect()
}

fn write_constraints(f: &mut fmt::Formatter<'_>, vars: &[String], cons: &[Constraint], prefix: &str) -> fmt::Result {
    for c in cons {
        let args: Vec<&str> = c.args.iter().map(|&v| vars[v].as_str()).collect();
        if c.symbol == "=" && args.len() == 2 {
            writeln!(f, "{} = {};", args[0], args[1])?;
        } else {
            writeln!(f, "{prefix}{}({});", c.symbol, args.join(","))?;
        }
    }
    Ok(())
}

/// A conjunction of atomic formulas over a single structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    structure: TemporalStructure,
    vars: Vec<String>,
    constraints: Vec<Constraint>,
}

impl Instance {
    pub fn new(structure: TemporalStructure) -> Self {
        Instance {
            structure,
            vars: Vec::new(),
            constraints: Vec::new(),
        }
    }

    /// Instance with a fixed variable list, so that variables without
    /// constraints still count.
    pub fn with_vars(structure: TemporalStructure, vars: &[&str]) -> Result<Self> {
        let mut inst = Self::new(structure);
        for v in vars {
            if inst.vars.iter().any(|w| w == v) {
                return Err(Error::Contract(format!("duplicate variable `{v}`")));
            }
            inst.var(v);
        }
        Ok(inst)
    }

    /// Index of the named variable, adding it if new.
    pub fn var(&mut self, name: &str) -> usize {
        intern(&mut self.vars, name)
    }

    /// Adds `symbol(args)`, introducing unseen variables.
    pub fn add(&mut self, symbol: &str, args: &[&str]) -> Result<()> {
        let args = args.iter().map(|a| self.var(a)).collect();
        self.push(Constraint::new(symbol, args))
    }

    pub fn push(&mut self, c: Constraint) -> Result<()> {
        check_constraint(&self.structure, &c, self.vars.len())?;
        self.constraints.push(c);
        Ok(())
    }

    pub fn structure(&self) -> &TemporalStructure {
        &self.structure
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Whether the rank vector `ranks` (one entry per variable) satisfies
    /// every constraint.
    pub fn satisfied_by(&self, ranks: &[u8]) -> Result<bool> {
        if ranks.len() != self.vars.len() {
            return Err(Error::Contract("assignment length differs from variable count".into()));
        }
        for (args, rel) in self.resolved()? {
            let vals: Vec<u8> = args.iter().map(|&v| ranks[v]).collect();
            if !rel.holds(&vals) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub(crate) fn resolved(&self) -> Result<Vec<(Vec<usize>, &TemporalRelation)>> {
        resolve(&self.structure, &self.constraints)
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_constraints(f, &self.vars, &self.constraints, "")
    }
}

/// Which structure of a combination a constraint belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    First,
    Second,
}

impl Side {
    pub fn index(self) -> usize {
        match self {
            Side::First => 0,
            Side::Second => 1,
        }
    }
}

/// A conjunction of atoms over the disjoint union of two signatures.
/// Equality atoms may be placed on either side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinedInstance {
    structures: [TemporalStructure; 2],
    vars: Vec<String>,
    sides: [Vec<Constraint>; 2],
}

impl CombinedInstance {
    pub fn new(first: TemporalStructure, second: TemporalStructure) -> Self {
        CombinedInstance {
            structures: [first, second],
            vars: Vec::new(),
            sides: [Vec::new(), Vec::new()],
        }
    }

    pub fn var(&mut self, name: &str) -> usize {
        intern(&mut self.vars, name)
    }

    pub fn add(&mut self, side: Side, symbol: &str, args: &[&str]) -> Result<()> {
        let args = args.iter().map(|a| self.var(a)).collect();
        self.push(side, Constraint::new(symbol, args))
    }

    pub fn push(&mut self, side: Side, c: Constraint) -> Result<()> {
        check_constraint(&self.structures[side.index()], &c, self.vars.len())?;
        self.sides[side.index()].push(c);
        Ok(())
    }

    pub fn structure(&self, side: Side) -> &TemporalStructure {
        &self.structures[side.index()]
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn constraints(&self, side: Side) -> &[Constraint] {
        &self.sides[side.index()]
    }

    /// The single-structure instance formed by one side, over all variables.
    pub fn side_instance(&self, side: Side) -> Instance {
        Instance {
            structure: self.structures[side.index()].clone(),
            vars: self.vars.clone(),
            constraints: self.sides[side.index()].clone(),
        }
    }
}

impl fmt::Display for CombinedInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for side in [Side::First, Side::Second] {
            let prefix = format!("{}.", self.structure(side).name());
            write_constraints(f, &self.vars, self.constraints(side), &prefix)?;
        }
        Ok(())
    }
}

/// An existential positive definition of `≠`: a disjunction of
/// pp-formulas in two free variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpDefinition {
    disjuncts: Vec<PPFormula>,
}

impl EpDefinition {
    pub fn new(disjuncts: Vec<PPFormula>) -> Result<Self> {
        if disjuncts.is_empty() {
            return Err(Error::Contract("an ep-definition needs at least one disjunct".into()));
        }
        if let Some(d) = disjuncts.iter().find(|d| d.free_count() != 2) {
            return Err(Error::Contract(format!("disjunct `{d}` does not have exactly two free variables")));
        }
        Ok(EpDefinition { disjuncts })
    }

    pub fn disjuncts(&self) -> &[PPFormula] {
        &self.disjuncts
    }

    /// Checks that the disjuncts jointly define `≠` over `a`.
    pub fn validate(&self, a: &TemporalStructure) -> Result<()> {
        let neq = builtin("!=")?;
        let mut union = TemporalRelation::empty(2)?;
        for d in &self.disjuncts {
            let r = eval_pp(d, a)?;
            if !r.is_subset(&neq) {
                return Err(Error::Contract(format!("disjunct `{d}` is satisfied by equal values")));
            }
            union = union.union(&r)?;
        }
        if union != neq {
            return Err(Error::Contract("the disjuncts do not cover all of ≠".into()));
        }
        Ok(())
    }
}

impl fmt::Display for EpDefinition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.disjuncts.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join(" ∨ "))
    }
}
