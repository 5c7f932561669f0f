//! Quantifier-free order formulas over positional variables.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Cmp {
    Lt,
    Le,
    Eq,
    Ne,
    Gt,
    Ge,
}

impl Cmp {
    pub fn holds(self, a: u8, b: u8) -> bool {
        match self {
            Cmp::Lt => a < b,
            Cmp::Le => a <= b,
            Cmp::Eq => a == b,
            Cmp::Ne => a != b,
            Cmp::Gt => a > b,
            Cmp::Ge => a >= b,
        }
    }

    /// The comparison with its arguments swapped (`a < b` iff `b > a`).
    pub fn flipped(self) -> Cmp {
        match self {
            Cmp::Lt => Cmp::Gt,
            Cmp::Le => Cmp::Ge,
            Cmp::Gt => Cmp::Lt,
            Cmp::Ge => Cmp::Le,
            c => c,
        }
    }

    pub fn negated(self) -> Cmp {
        match self {
            Cmp::Lt => Cmp::Ge,
            Cmp::Le => Cmp::Gt,
            Cmp::Eq => Cmp::Ne,
            Cmp::Ne => Cmp::Eq,
            Cmp::Gt => Cmp::Le,
            Cmp::Ge => Cmp::Lt,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Cmp::Lt => "<",
            Cmp::Le => "<=",
            Cmp::Eq => "=",
            Cmp::Ne => "!=",
            Cmp::Gt => ">",
            Cmp::Ge => ">=",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Cmp> {
        Some(match s {
            "<" => Cmp::Lt,
            "<=" | "≤" => Cmp::Le,
            "=" => Cmp::Eq,
            "!=" | "≠" => Cmp::Ne,
            ">" => Cmp::Gt,
            ">=" | "≥" => Cmp::Ge,
            _ => return None,
        })
    }
}

/// `lhs ∘ rhs` over variable indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub lhs: usize,
    pub op: Cmp,
    pub rhs: usize,
}

impl Literal {
    pub fn new(lhs: usize, op: Cmp, rhs: usize) -> Self {
        Literal { lhs, op, rhs }
    }

    pub fn eval(&self, ranks: &[u8]) -> bool {
        self.op.holds(ranks[self.lhs], ranks[self.rhs])
    }

    /// The same literal written with `head` on the left, if it mentions `head`.
    pub fn oriented(&self, head: usize) -> Option<Literal> {
        if self.lhs == head {
            Some(*self)
        } else if self.rhs == head {
            Some(Literal::new(self.rhs, self.op.flipped(), self.lhs))
        } else {
            None
        }
    }

    fn max_var(&self) -> usize {
        self.lhs.max(self.rhs)
    }
}

/// A disjunction of literals; the empty clause is ⊥.
pub type Clause = Vec<Literal>;

/// Conjunctive normal form over a named, ordered variable list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrderCnf {
    variables: Vec<String>,
    clauses: Vec<Clause>,
}

impl OrderCnf {
    pub fn new(variables: Vec<String>, clauses: Vec<Clause>) -> Result<Self> {
        if variables.is_empty() {
            return Err(Error::InvalidArity(0));
        }
        for lit in clauses.iter().flatten() {
            if lit.max_var() >= variables.len() {
                return Err(Error::Contract(format!(
                    "literal refers to variable #{} but only {} are declared",
                    lit.max_var() + 1,
                    variables.len()
                )));
            }
        }
        Ok(OrderCnf { variables, clauses })
    }

    /// Variables named `x1..xk`.
    pub fn positional(arity: usize, clauses: Vec<Clause>) -> Result<Self> {
        Self::new(positional_names(arity), clauses)
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn arity(&self) -> usize {
        self.variables.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn has_bottom(&self) -> bool {
        self.clauses.iter().any(|c| c.is_empty())
    }

    pub fn eval(&self, ranks: &[u8]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|lit| lit.eval(ranks)))
    }

    pub fn literal_count(&self) -> usize {
        self.clauses.iter().map(Vec::len).sum()
    }
}

pub fn positional_names(arity: usize) -> Vec<String> {
    (1..=arity).map(|i| format!("x{i}")).collect()
}

fn write_literal(f: &mut fmt::Formatter<'_>, vars: &[String], lit: &Literal) -> fmt::Result {
    write!(f, "{} {} {}", vars[lit.lhs], lit.op.symbol(), vars[lit.rhs])
}

fn write_clause(f: &mut fmt::Formatter<'_>, vars: &[String], clause: &Clause, parens: bool) -> fmt::Result {
    if clause.is_empty() {
        return write!(f, "false");
    }
    let wrap = parens && clause.len() > 1;
    if wrap {
        write!(f, "(")?;
    }
    for (i, lit) in clause.iter().enumerate() {
        if i > 0 {
            write!(f, " | ")?;
        }
        write_literal(f, vars, lit)?;
    }
    if wrap {
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for OrderCnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.clauses.is_empty() {
            return write!(f, "true");
        }
        let parens = self.clauses.len() > 1;
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                write!(f, " & ")?;
            }
            write_clause(f, &self.variables, c, parens)?;
        }
        Ok(())
    }
}

/// Arbitrary and/or combination of order literals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrderFormula {
    True,
    False,
    Lit(Literal),
    And(Vec<OrderFormula>),
    Or(Vec<OrderFormula>),
}

impl OrderFormula {
    pub fn lit(lhs: usize, op: Cmp, rhs: usize) -> Self {
        OrderFormula::Lit(Literal::new(lhs, op, rhs))
    }

    pub fn eval(&self, ranks: &[u8]) -> bool {
        match self {
            OrderFormula::True => true,
            OrderFormula::False => false,
            OrderFormula::Lit(l) => l.eval(ranks),
            OrderFormula::And(fs) => fs.iter().all(|f| f.eval(ranks)),
            OrderFormula::Or(fs) => fs.iter().any(|f| f.eval(ranks)),
        }
    }

    /// Distributes disjunctions over conjunctions. Tautological clauses are
    /// dropped; duplicate literals are merged.
    pub fn to_clauses(&self) -> Vec<Clause> {
        match self {
            OrderFormula::True => vec![],
            OrderFormula::False => vec![vec![]],
            OrderFormula::Lit(l) => vec![vec![*l]],
            OrderFormula::And(fs) => {
                let mut out: Vec<Clause> = Vec::new();
                for f in fs {
                    for c in f.to_clauses() {
                        if !out.contains(&c) {
                            out.push(c);
                        }
                    }
                }
                out
            }
            OrderFormula::Or(fs) => {
                let mut acc: Vec<Clause> = vec![vec![]];
                for f in fs {
                    let part = f.to_clauses();
                    let mut next = Vec::with_capacity(acc.len() * part.len().max(1));
                    for a in &acc {
                        for p in &part {
                            let mut c = a.clone();
                            for l in p {
                                if !c.contains(l) {
                                    c.push(*l);
                                }
                            }
                            if !is_tautology(&c) && !next.contains(&c) {
                                next.push(c);
                            }
                        }
                    }
                    acc = next;
                }
                acc
            }
        }
    }

    pub fn to_cnf(&self, variables: Vec<String>) -> Result<OrderCnf> {
        OrderCnf::new(variables, self.to_clauses())
    }

    pub fn max_var(&self) -> Option<usize> {
        match self {
            OrderFormula::True | OrderFormula::False => None,
            OrderFormula::Lit(l) => Some(l.max_var()),
            OrderFormula::And(fs) | OrderFormula::Or(fs) => {
                fs.iter().filter_map(OrderFormula::max_var).max()
            }
        }
    }

    pub fn display<'a>(&'a self, vars: &'a [String]) -> impl fmt::Display + 'a {
        FormulaDisplay { f: self, vars }
    }
}

fn is_tautology(c: &Clause) -> bool {
    c.iter().any(|l| {
        (l.lhs == l.rhs && matches!(l.op, Cmp::Eq | Cmp::Le | Cmp::Ge))
            || c.iter().any(|m| {
                let m = if m.lhs == l.lhs && m.rhs == l.rhs {
                    Some(m.op)
                } else if m.lhs == l.rhs && m.rhs == l.lhs {
                    Some(m.op.flipped())
                } else {
                    None
                };
                m == Some(l.op.negated())
            })
    })
}

struct FormulaDisplay<'a> {
    f: &'a OrderFormula,
    vars: &'a [String],
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(f: &mut fmt::Formatter<'_>, x: &OrderFormula, vars: &[String], nested: bool) -> fmt::Result {
            match x {
                OrderFormula::True => write!(f, "true"),
                OrderFormula::False => write!(f, "false"),
                OrderFormula::Lit(l) => write_literal(f, vars, l),
                OrderFormula::And(fs) | OrderFormula::Or(fs) => {
                    let sep = if matches!(x, OrderFormula::And(_)) { " & " } else { " | " };
                    if nested {
                        write!(f, "(")?;
                    }
                    for (i, g) in fs.iter().enumerate() {
                        if i > 0 {
                            write!(f, "{sep}")?;
                        }
                        go(f, g, vars, true)?;
                    }
                    if nested {
                        write!(f, ")")?;
                    }
                    Ok(())
                }
            }
        }
        go(f, self.f, self.vars, false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distribution_produces_equivalent_cnf() {
        // (x1 < x2 & x2 < x3) | (x3 < x2 & x2 < x1)
        let f = OrderFormula::Or(vec![
            OrderFormula::And(vec![
                OrderFormula::lit(0, Cmp::Lt, 1),
                OrderFormula::lit(1, Cmp::Lt, 2),
            ]),
            OrderFormula::And(vec![
                OrderFormula::lit(2, Cmp::Lt, 1),
                OrderFormula::lit(1, Cmp::Lt, 0),
            ]),
        ]);
        let cnf = f.to_cnf(positional_names(3)).unwrap();
        for w in crate::order::enumerate_weak_orders(3).unwrap() {
            assert_eq!(cnf.eval(w.ranks()), f.eval(w.ranks()), "{w}");
        }
    }

    #[test]
    fn out_of_range_variable_rejected() {
        let bad = OrderCnf::positional(2, vec![vec![Literal::new(0, Cmp::Lt, 2)]]);
        assert!(bad.is_err());
    }

    #[test]
    fn display_round_shape() {
        let cnf = OrderCnf::positional(
            3,
            vec![
                vec![Literal::new(0, Cmp::Ge, 1), Literal::new(0, Cmp::Gt, 2)],
                vec![Literal::new(1, Cmp::Ge, 0), Literal::new(1, Cmp::Gt, 2)],
            ],
        )
        .unwrap();
        assert_eq!(cnf.to_string(), "(x1 >= x2 | x1 > x3) & (x2 >= x1 | x2 > x3)");
    }
}
