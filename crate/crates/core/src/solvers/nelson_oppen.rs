//! Combination of two decision procedures in the style of Nelson and Oppen,
//! for theories where `≠` is independent and has an existential positive
//! definition.
//!
//! For each side, each pair of variables and each disjunct `D` of the
//! side's definition of `≠`, the side is tested together with `D(x, y)`. If
//! every disjunct is unsatisfiable, `x = y` is entailed and the two
//! variables are merged on both sides. This repeats until no merge happens;
//! the instance is satisfiable iff both sides are.

use serde::{Deserialize, Serialize};

use super::instance::{CombinedInstance, Constraint, EpDefinition, Instance, Side};
use super::min_closed::solve_min_closed;
use super::oracle::{solve_oracle_with, SolveOutcome};
use crate::error::{Error, Result};
use crate::pp::PPFormula;
use crate::structure::Caps;

/// A decision procedure for the CSP of one structure.
pub trait CspSolver {
    fn name(&self) -> &str;
    fn solve(&self, inst: &Instance) -> Result<SolveOutcome>;
}

/// The exact search oracle.
#[derive(Debug, Clone, Copy, Default)]
pub struct OracleSolver {
    pub caps: Caps,
}

impl CspSolver for OracleSolver {
    fn name(&self) -> &str {
        "oracle"
    }

    fn solve(&self, inst: &Instance) -> Result<SolveOutcome> {
        solve_oracle_with(inst, &self.caps)
    }
}

/// The polynomial solver for min-preserved structures.
#[derive(Debug, Clone, Copy, Default)]
pub struct MinClosedSolver;

impl CspSolver for MinClosedSolver {
    fn name(&self) -> &str {
        "min-closed"
    }

    fn solve(&self, inst: &Instance) -> Result<SolveOutcome> {
        solve_min_closed(inst)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum TraceEvent {
    /// Satisfiability of a side with no extra atom.
    SideCheck { side: usize, sat: bool },
    /// Outcome of testing `disjunct(x, y)` together with a side.
    DisjunctTest {
        side: usize,
        x: String,
        y: String,
        disjunct: usize,
        sat: bool,
    },
    /// `y` replaced by `x` on both sides.
    Merge { side: usize, x: String, y: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombineReport {
    pub sat: bool,
    pub solver_calls: usize,
    pub rounds: usize,
    /// Merged pairs `(kept, replaced)`, by original variable name.
    pub merges: Vec<(String, String)>,
    pub trace: Vec<TraceEvent>,
}

/// Side `side` of the current instance plus `disjunct(x, y)`, with the
/// disjunct's bound variables added as fresh variables.
fn with_disjunct(base: &Instance, disjunct: &PPFormula, x: usize, y: usize) -> Result<Instance> {
    let mut inst = base.clone();
    let mut map = vec![x, y];
    for b in disjunct.bound_vars() {
        let mut name = format!("_{b}");
        while inst.vars().contains(&name) {
            name.push('\'');
        }
        map.push(inst.var(&name));
    }
    for atom in disjunct.atoms() {
        inst.push(Constraint::new(atom.symbol.clone(), atom.args.iter().map(|&v| map[v]).collect()))?;
    }
    Ok(inst)
}

/// Each side of `inst` restricted to the live variables, with every live
/// variable occurring on both sides via padding atoms `v = v`.
fn build_sides(inst: &CombinedInstance, rep: &[usize]) -> Result<[Instance; 2]> {
    let live: Vec<usize> = (0..rep.len()).filter(|&v| rep[v] == v).collect();
    let names: Vec<&str> = live.iter().map(|&v| inst.vars()[v].as_str()).collect();
    let pos = |v: usize| live.iter().position(|&l| l == rep[v]).expect("representative is live");
    let mut out = Vec::with_capacity(2);
    for side in [Side::First, Side::Second] {
        let mut s = Instance::with_vars(inst.structure(side).clone(), &names)?;
        let mut occurs = vec![false; live.len()];
        for c in inst.constraints(side) {
            let args: Vec<usize> = c.args.iter().map(|&v| pos(v)).collect();
            for &a in &args {
                occurs[a] = true;
            }
            s.push(Constraint::new(c.symbol.clone(), args))?;
        }
        for (v, _) in occurs.iter().enumerate().filter(|(_, &o)| !o) {
            s.push(Constraint::new("=", vec![v, v]))?;
        }
        out.push(s);
    }
    let second = out.pop().unwrap();
    let first = out.pop().unwrap();
    Ok([first, second])
}

fn find(rep: &[usize], v: usize) -> usize {
    let mut v = v;
    while rep[v] != v {
        v = rep[v];
    }
    v
}

/// Decides `inst` using one solver per side and an ep-definition of `≠`
/// per side. Preconditions (independence of `≠` from both sides) are the
/// caller's responsibility.
pub fn combine_nelson_oppen(
    inst: &CombinedInstance,
    solvers: [&dyn CspSolver; 2],
    eps: [&EpDefinition; 2],
) -> Result<CombineReport> {
    let n = inst.num_vars();
    let mut rep: Vec<usize> = (0..n).collect();
    let mut report = CombineReport {
        sat: false,
        solver_calls: 0,
        rounds: 0,
        merges: Vec::new(),
        trace: Vec::new(),
    };

    let sides = build_sides(inst, &rep)?;
    for (i, s) in sides.iter().enumerate() {
        report.solver_calls += 1;
        let sat = solvers[i].solve(s)?.is_sat();
        report.trace.push(TraceEvent::SideCheck { side: i + 1, sat });
        if !sat {
            return Ok(report);
        }
    }

    loop {
        report.rounds += 1;
        let mut merged = false;
        'sides: for i in 0..2 {
            let sides = build_sides(inst, &rep)?;
            let live: Vec<usize> = (0..n).filter(|&v| rep[v] == v).collect();
            for a in 0..live.len() {
                for b in a + 1..live.len() {
                    let mut any_sat = false;
                    for (d_idx, d) in eps[i].disjuncts().iter().enumerate() {
                        let test = with_disjunct(&sides[i], d, a, b)?;
                        report.solver_calls += 1;
                        let sat = solvers[i].solve(&test)?.is_sat();
                        report.trace.push(TraceEvent::DisjunctTest {
                            side: i + 1,
                            x: inst.vars()[live[a]].clone(),
                            y: inst.vars()[live[b]].clone(),
                            disjunct: d_idx,
                            sat,
                        });
                        if sat {
                            any_sat = true;
                            break;
                        }
                    }
                    if !any_sat {
                        let (keep, drop) = (live[a], live[b]);
                        rep[drop] = keep;
                        for v in 0..n {
                            rep[v] = find(&rep, v);
                        }
                        let (x, y) = (inst.vars()[keep].clone(), inst.vars()[drop].clone());
                        report.trace.push(TraceEvent::Merge {
                            side: i + 1,
                            x: x.clone(),
                            y: y.clone(),
                        });
                        report.merges.push((x, y));
                        if report.merges.len() > n {
                            return Err(Error::Internal("more merges than variables".into()));
                        }
                        merged = true;
                        break 'sides;
                    }
                }
            }
        }
        if !merged {
            break;
        }
    }

    let sides = build_sides(inst, &rep)?;
    report.sat = true;
    for (i, s) in sides.iter().enumerate() {
        report.solver_calls += 1;
        let sat = solvers[i].solve(s)?.is_sat();
        report.trace.push(TraceEvent::SideCheck { side: i + 1, sat });
        report.sat &= sat;
    }
    Ok(report)
}
