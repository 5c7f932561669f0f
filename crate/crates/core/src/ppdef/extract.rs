//! Constructive primitive positive definitions of `R^mix`.
//!
//! For a structure preserved by pp but not by ll, `R^mix` is pp-definable.
//! The route depends on which of mix, mi, min, mx preserve the structure;
//! each route builds a chain of definitions from a relation of the
//! structure and checks every link with the evaluator.

use serde::{Deserialize, Serialize};

use super::constructions::{le_from_t3, lt_from_neq_le, neq_from_t3, rmi_from_rmin_le, rmin_le_from_t3, rmix_from_rmi, rmix_from_x};
use super::search::{bounded_ppdef_search, SearchOutcome};
use crate::error::{Error, Result};
use crate::formula::Cmp;
use crate::normal_form::{form_clause, mix_pair_half, synthesize_form, Form};
use crate::ops::{preserves, preserves_structure, OpSpec};
use crate::pp::{eval_pp_with, Atom, PPFormula};
use crate::relation::{builtin, TemporalRelation};
use crate::structure::{Caps, TemporalStructure};

/// Bounds used when searching for auxiliary relations.
const AUX_BOUND: usize = 2;
const AUX_ATOMS: usize = 3;
/// Variable cap for evaluating the flattened formula.
const FLAT_EVAL_VARS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// A short quantifier-free definition found by search.
    Direct,
    /// Structure preserved by mix.
    Mix,
    /// Preserved by mi (not mix), using `≤`.
    MiLe,
    /// Preserved by min, not by mi nor mx.
    Min,
    /// Preserved by mx, not by mi, through the relation X.
    MxX,
    /// None of the above, through the relation T3.
    T3,
}

/// One link of a definition chain: `name` is defined by `formula` over the
/// structure extended by the earlier links.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefinitionStep {
    pub name: String,
    pub formula: PPFormula,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RmixExtraction {
    pub route: Route,
    pub steps: Vec<DefinitionStep>,
    /// The chain with every defined symbol substituted.
    pub formula: PPFormula,
    /// Auxiliary relations for which no definition was found; the formula
    /// refers to them by name and is only valid if they are pp-definable.
    pub conditional_on: Vec<String>,
    /// Every chain link evaluated to its intended relation.
    pub steps_validated: bool,
    /// The flattened formula evaluated to `R^mix`; `None` if it has too
    /// many variables to evaluate.
    pub flat_validated: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum ExtractOutcome {
    Extracted(RmixExtraction),
    Inapplicable { reason: String },
}

/// Structure extended by defined and auxiliary relations.
struct Chain {
    base: TemporalStructure,
    work: TemporalStructure,
    steps: Vec<DefinitionStep>,
    conditional_on: Vec<String>,
}

impl Chain {
    fn new(a: &TemporalStructure) -> Self {
        Chain {
            base: a.clone(),
            work: a.clone(),
            steps: Vec::new(),
            conditional_on: Vec::new(),
        }
    }

    fn fresh(&self, base: &str) -> String {
        let mut name = base.to_string();
        while self.work.get(&name).is_some() {
            name.push('\'');
        }
        name
    }

    /// Evaluates `formula` over the working structure and records it as a
    /// definition of `expected` if it matches.
    fn define(&mut self, base: &str, formula: PPFormula, expected: &TemporalRelation) -> Result<Option<String>> {
        let got = eval_pp_with(&formula, &self.work, &Caps::default())?;
        if got != *expected {
            return Ok(None);
        }
        let name = self.fresh(base);
        self.work.add(name.clone(), got)?;
        self.steps.push(DefinitionStep {
            name: name.clone(),
            text: formula.to_string(),
            formula,
        });
        Ok(Some(name))
    }

    fn must_define(&mut self, base: &str, formula: PPFormula, expected: &TemporalRelation) -> Result<String> {
        let text = formula.to_string();
        self.define(base, formula, expected)?
            .ok_or_else(|| Error::Internal(format!("construction `{text}` does not define {base}")))
    }

    /// A symbol of the working structure equal to `rel`.
    fn existing(&self, rel: &TemporalRelation) -> Option<String> {
        self.work
            .relations()
            .iter()
            .find(|(_, r)| r == rel)
            .map(|(s, _)| s.clone())
    }

    /// A symbol for the library relation `lib`: an existing symbol, a
    /// searched definition over the original structure, or, failing both,
    /// the relation itself marked as a condition.
    fn auxiliary(&mut self, lib: &str) -> Result<String> {
        let rel = builtin(lib)?;
        if let Some(s) = self.existing(&rel) {
            return Ok(s);
        }
        if let SearchOutcome::Found { formula } = bounded_ppdef_search(&self.base, &rel, AUX_BOUND, AUX_ATOMS)? {
            return self.must_define(lib, formula, &rel);
        }
        let name = self.fresh(lib);
        self.work.add(name.clone(), rel)?;
        self.conditional_on.push(name.clone());
        Ok(name)
    }

    fn finish(self, route: Route, top: &str, rmix: &TemporalRelation) -> Result<RmixExtraction> {
        let mut flat = self
            .steps
            .iter()
            .find(|s| s.name == top)
            .map(|s| s.formula.clone())
            .ok_or_else(|| Error::Internal("missing final definition".into()))?;
        for step in self.steps.iter().rev() {
            if step.name != top {
                flat = flat.substitute(&step.name, &step.formula)?;
            }
        }
        let flat_validated = if flat.vars().len() <= FLAT_EVAL_VARS {
            let caps = Caps {
                pp_vars: FLAT_EVAL_VARS,
                ..Caps::default()
            };
            let ok = eval_pp_with(&flat, &self.work, &caps)? == *rmix;
            if !ok {
                return Err(Error::Internal(format!("flattened formula `{flat}` does not define R^mix")));
            }
            Some(true)
        } else {
            None
        };
        Ok(RmixExtraction {
            route,
            steps: self.steps,
            formula: flat,
            conditional_on: self.conditional_on,
            steps_validated: true,
            flat_validated,
        })
    }
}

/// Builds a formula over the coordinates of `sym` (arity `arity`) with
/// coordinate `c` renamed to free variable `free_of[c]` where given.
struct CoordFormula {
    free: Vec<String>,
    coord_var: Vec<usize>,
    vars: Vec<String>,
    atoms: Vec<Atom>,
}

impl CoordFormula {
    /// `free` variables first; coordinates mapped by `fixed` to a free
    /// variable index, the rest become bound variables `c<i>`.
    fn new(free: &[&str], arity: usize, fixed: &[(usize, usize)]) -> Self {
        let mut vars: Vec<String> = free.iter().map(|s| s.to_string()).collect();
        let mut coord_var = vec![usize::MAX; arity];
        for &(c, f) in fixed {
            coord_var[c] = f;
        }
        for (c, slot) in coord_var.iter_mut().enumerate() {
            if *slot == usize::MAX {
                vars.push(format!("c{}", c + 1));
                *slot = vars.len() - 1;
            }
        }
        CoordFormula {
            free: free.iter().map(|s| s.to_string()).collect(),
            coord_var,
            vars,
            atoms: Vec::new(),
        }
    }

    fn coord(&self, c: usize) -> usize {
        self.coord_var[c]
    }

    fn atom(&mut self, sym: &str, args: Vec<usize>) {
        self.atoms.push(Atom::new(sym, args));
    }

    fn build(self) -> Result<PPFormula> {
        PPFormula::new(self.vars, self.free.len(), self.atoms)
    }
}

fn relation_symbols_not_ll(a: &TemporalStructure) -> Vec<(String, TemporalRelation)> {
    a.relations()
        .iter()
        .filter(|(_, r)| !preserves(OpSpec::LL, r))
        .cloned()
        .collect()
}

/// Mix route: a pair clause `(x ≥ y ∨ ⋁ x > z_i) ∧ (y ≥ x ∨ ⋁ y > z_i)`
/// of a relation gives `∃.. (R(..) ∧ ⋀_{i≥2} (x < z_i ∧ y < z_i) ∧ z < z_1)`.
fn mix_route(chain: &mut Chain, rmix: &TemporalRelation) -> Result<Option<String>> {
    let lt = chain.auxiliary("<")?;
    for (sym, r) in relation_symbols_not_ll(&chain.base) {
        let Some(cnf) = synthesize_form(&r, Form::Mix)? else {
            continue;
        };
        let mut halves: Vec<(usize, usize, Vec<usize>)> = cnf.clauses().iter().filter_map(mix_pair_half).collect();
        halves.retain(|(x, y, w)| x < y && !w.is_empty());
        for (x, y, w) in halves {
            for &z1 in &w {
                let mut f = CoordFormula::new(&["x", "y", "z"], r.arity(), &[(x, 0), (y, 1)]);
                let args = (0..r.arity()).map(|c| f.coord(c)).collect();
                f.atom(&sym, args);
                for &zi in w.iter().filter(|&&zi| zi != z1) {
                    let (cx, cy, cz) = (f.coord(x), f.coord(y), f.coord(zi));
                    f.atom(&lt, vec![cx, cz]);
                    f.atom(&lt, vec![cy, cz]);
                }
                let cz1 = f.coord(z1);
                f.atom(&lt, vec![2, cz1]);
                if let Some(name) = chain.define("Rmix", f.build()?, rmix)? {
                    return Ok(Some(name));
                }
            }
        }
    }
    Ok(None)
}

/// Mi route with `≤`: a clause `x ≥ y ∨ ⋁ x > y_i ∨ ⋁ x ≠ z_i` gives
/// `R^mi(x,y',z) = ∃.. (y' ≤ y ∧ z ≤ y_j ∧ R(..) ∧ ⋀_{i≠j} x ≤ y_i ∧ ⋀ x = z_i)`.
fn mi_route(chain: &mut Chain, rmix: &TemporalRelation) -> Result<Option<String>> {
    let le = chain.auxiliary("<=")?;
    let rmi = builtin("Rmi")?;
    for (sym, r) in relation_symbols_not_ll(&chain.base) {
        let Some(cnf) = synthesize_form(&r, Form::Mi)? else {
            continue;
        };
        for clause in cnf.clauses() {
            let Some((head, lits)) = form_clause(clause, Form::Mi) else {
                continue;
            };
            let Some(ge) = lits.iter().find(|l| l.op == Cmp::Ge).map(|l| l.rhs) else {
                continue;
            };
            let gt: Vec<usize> = lits.iter().filter(|l| l.op == Cmp::Gt).map(|l| l.rhs).collect();
            let ne: Vec<usize> = lits.iter().filter(|l| l.op == Cmp::Ne).map(|l| l.rhs).collect();
            for &j in &gt {
                let mut f = CoordFormula::new(&["x", "y", "z"], r.arity(), &[(head, 0)]);
                let (cy, cj) = (f.coord(ge), f.coord(j));
                f.atom(&le, vec![1, cy]);
                f.atom(&le, vec![2, cj]);
                let args = (0..r.arity()).map(|c| f.coord(c)).collect();
                f.atom(&sym, args);
                for &i in gt.iter().filter(|&&i| i != j) {
                    let ci = f.coord(i);
                    f.atom(&le, vec![0, ci]);
                }
                for &i in &ne {
                    let ci = f.coord(i);
                    f.atom("=", vec![0, ci]);
                }
                if let Some(name) = chain.define("Rmi", f.build()?, &rmi)? {
                    let top = rmix_from_rmi().rename_symbol("Rmi", &name);
                    return Ok(Some(chain.must_define("Rmix", top, rmix)?));
                }
            }
        }
    }
    Ok(None)
}

/// Min route: a clause `⋁ x > x_i ∨ ⋁ x ≥ y_i` with at least two weak
/// literals gives `R^min_≤(x,u,v)`, then `R^mi`, then `R^mix`.
fn min_route(chain: &mut Chain, rmix: &TemporalRelation) -> Result<Option<String>> {
    let le = chain.auxiliary("<=")?;
    let lt = chain.auxiliary("<")?;
    let rmin_le = builtin("Rmin_le")?;
    let candidates: Vec<(String, TemporalRelation)> = chain
        .base
        .relations()
        .iter()
        .filter(|(_, r)| !preserves(OpSpec::MI, r))
        .cloned()
        .collect();
    for (sym, r) in candidates {
        let Some(cnf) = synthesize_form(&r, Form::Min)? else {
            continue;
        };
        for clause in cnf.clauses() {
            let Some((head, lits)) = form_clause(clause, Form::Min) else {
                continue;
            };
            let gt: Vec<usize> = lits.iter().filter(|l| l.op == Cmp::Gt).map(|l| l.rhs).collect();
            let ge: Vec<usize> = lits.iter().filter(|l| l.op == Cmp::Ge).map(|l| l.rhs).collect();
            if ge.len() < 2 {
                continue;
            }
            for &y1 in &ge {
                for &y2 in ge.iter().filter(|&&y2| y2 != y1) {
                    let mut f = CoordFormula::new(&["x", "u", "v"], r.arity(), &[(head, 0)]);
                    let args = (0..r.arity()).map(|c| f.coord(c)).collect();
                    f.atom(&sym, args);
                    let (c1, c2) = (f.coord(y1), f.coord(y2));
                    f.atom(&le, vec![1, c1]);
                    f.atom(&le, vec![2, c2]);
                    for &i in &gt {
                        let ci = f.coord(i);
                        f.atom(&le, vec![0, ci]);
                    }
                    for &i in ge.iter().filter(|&&i| i != y1 && i != y2) {
                        let ci = f.coord(i);
                        f.atom(&lt, vec![0, ci]);
                    }
                    if let Some(name) = chain.define("Rmin_le", f.build()?, &rmin_le)? {
                        let rmi_def = rmi_from_rmin_le().rename_symbol("Rmin_le", &name).rename_symbol("<", &lt);
                        let rmi = chain.must_define("Rmi", rmi_def, &builtin("Rmi")?)?;
                        let top = rmix_from_rmi().rename_symbol("Rmi", &rmi);
                        return Ok(Some(chain.must_define("Rmix", top, rmix)?));
                    }
                }
            }
        }
    }
    Ok(None)
}

fn mx_route(chain: &mut Chain, rmix: &TemporalRelation) -> Result<Option<String>> {
    let x = chain.auxiliary("X")?;
    let top = rmix_from_x().rename_symbol("X", &x);
    chain.define("Rmix", top, rmix)
}

fn t3_route(chain: &mut Chain, rmix: &TemporalRelation) -> Result<Option<String>> {
    let t3 = chain.auxiliary("T3")?;
    let le = match chain.existing(&builtin("<=")?) {
        Some(s) => s,
        None => chain.must_define("Le", le_from_t3().rename_symbol("T3", &t3), &builtin("<=")?)?,
    };
    let lt = match chain.existing(&builtin("<")?) {
        Some(s) => s,
        None => {
            let neq = match chain.existing(&builtin("!=")?) {
                Some(s) => s,
                None => chain.must_define("Neq", neq_from_t3().rename_symbol("T3", &t3), &builtin("!=")?)?,
            };
            let def = lt_from_neq_le().rename_symbol("!=", &neq).rename_symbol("<=", &le);
            chain.must_define("Lt", def, &builtin("<")?)?
        }
    };
    let rmin_def = rmin_le_from_t3().rename_symbol("T3", &t3).rename_symbol("<=", &le);
    let rmin = chain.must_define("Rmin_le", rmin_def, &builtin("Rmin_le")?)?;
    let rmi_def = rmi_from_rmin_le().rename_symbol("Rmin_le", &rmin).rename_symbol("<", &lt);
    let rmi = chain.must_define("Rmi", rmi_def, &builtin("Rmi")?)?;
    let top = rmix_from_rmi().rename_symbol("Rmi", &rmi);
    chain.define("Rmix", top, rmix)
}

/// Emits a validated pp-definition of `R^mix` over `a`, or reports that the
/// preconditions (preserved by pp, not preserved by ll) fail.
pub fn extract_rmix_definition(a: &TemporalStructure) -> Result<ExtractOutcome> {
    for (sym, r) in a.relations() {
        if synthesize_form(r, Form::Pp)?.is_none() {
            return Ok(ExtractOutcome::Inapplicable {
                reason: format!("relation `{sym}` is not preserved by pp"),
            });
        }
    }
    if preserves_structure(OpSpec::LL, a) {
        return Ok(ExtractOutcome::Inapplicable {
            reason: "the structure is preserved by ll, so R^mix is not pp-definable".into(),
        });
    }
    let rmix = builtin("Rmix")?;

    let mut chain = Chain::new(a);
    if let SearchOutcome::Found { formula } = bounded_ppdef_search(a, &rmix, 0, 2)? {
        let name = chain.must_define("Rmix", formula, &rmix)?;
        return Ok(ExtractOutcome::Extracted(chain.finish(Route::Direct, &name, &rmix)?));
    }

    type RouteFn = fn(&mut Chain, &TemporalRelation) -> Result<Option<String>>;
    let route: (Route, RouteFn) = if preserves_structure(OpSpec::MIX, a) {
        (Route::Mix, mix_route)
    } else if preserves_structure(OpSpec::MI, a) {
        (Route::MiLe, mi_route)
    } else if preserves_structure(OpSpec::MIN, a) {
        (Route::Min, min_route)
    } else if preserves_structure(OpSpec::MX, a) {
        (Route::MxX, mx_route)
    } else {
        (Route::T3, t3_route)
    };
    let mut chain = Chain::new(a);
    match (route.1)(&mut chain, &rmix)? {
        Some(top) => Ok(ExtractOutcome::Extracted(chain.finish(route.0, &top, &rmix)?)),
        None => Err(Error::Internal(format!(
            "the {:?} route produced no formula defining R^mix",
            route.0
        ))),
    }
}
