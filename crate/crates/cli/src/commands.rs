//! Command implementations. Each command returns a JSON result and whether
//! the outcome is positive (sat, preserved, found, applicable).

use serde_json::{json, Value};
use tcsp_core::classify::{classify_combination, classify_temporal, has_binary_injective, CombinationOutcome};
use tcsp_core::normal_form::{recognize_form, synthesize_form_with, Form};
use tcsp_core::ops::{preservation_counterexample, preserves, preserves_structure, OpSpec};
use tcsp_core::ppdef::{
    bounded_ppdef_search, check_cross_prevention, extract_rmix_definition, search_cross_prevention, ExtractOutcome,
    SearchOutcome,
};
use tcsp_core::solvers::{
    combine_nelson_oppen, independence_falsifier, solve_combined_oracle_with, solve_min_closed, solve_oracle_with,
    CspSolver, EpDefinition, IndependenceReport, MinClosedSolver, OracleSolver,
};
use tcsp_core::syntax::Parser;
use tcsp_core::{builtin, Atom, Caps, Error, PPFormula, TemporalRelation, TemporalStructure};

use crate::error::{CliError, CliResult};
use crate::manifest::{is_identifier, parse_relation_arg, BuiltInstance, Manifest};

/// Options shared by all commands.
#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub seed: u64,
    pub caps: Caps,
}

pub struct Outcome {
    pub result: Value,
    pub positive: bool,
}

fn to_value<T: serde::Serialize>(v: &T) -> CliResult<Value> {
    Ok(serde_json::to_value(v)?)
}

fn relations_summary(a: &TemporalStructure) -> Value {
    Value::Array(
        a.relations()
            .iter()
            .map(|(s, r)| json!({ "symbol": s, "arity": r.arity(), "orbits": r.len() }))
            .collect(),
    )
}

pub fn classify(m: &Manifest, structure: Option<&str>, st: &Settings) -> CliResult<Outcome> {
    let a = m.structure(structure, st.caps.arity)?;
    a.check_caps(&st.caps)?;
    let v = classify_temporal(&a)?;
    Ok(Outcome {
        result: json!({
            "structure": a.name(),
            "relations": relations_summary(&a),
            "verdict": to_value(&v)?,
            "binary_injective": to_value(&has_binary_injective(&a))?,
        }),
        positive: true,
    })
}

pub fn classify_comb(m: &Manifest, first: Option<&str>, second: Option<&str>, st: &Settings) -> CliResult<Outcome> {
    let (n1, n2) = match (first, second) {
        (Some(a), Some(b)) => (a.to_string(), b.to_string()),
        _ if m.structures.len() >= 2 => (
            first.unwrap_or(&m.structures[0].name).to_string(),
            second.unwrap_or(&m.structures[1].name).to_string(),
        ),
        _ => return Err(CliError::Usage("classify-comb needs two structures".into())),
    };
    let a1 = m.structure(Some(&n1), st.caps.arity)?;
    let a2 = m.structure(Some(&n2), st.caps.arity)?;
    let out = classify_combination(&a1, &a2)?;
    let positive = matches!(out, CombinationOutcome::Verdict(_));
    Ok(Outcome {
        result: json!({ "first": n1, "second": n2, "outcome": to_value(&out)? }),
        positive,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SolverChoice {
    /// The polynomial min solver when every relation is preserved by min,
    /// the exact oracle otherwise.
    Auto,
    Oracle,
    Min,
}

fn min_applicable(a: &TemporalStructure) -> bool {
    preserves_structure(OpSpec::MIN, a)
}

pub fn solve(m: &Manifest, instance: Option<&str>, solver: SolverChoice, st: &Settings) -> CliResult<Outcome> {
    let BuiltInstance::Single(inst) = m.instance(instance, st.caps.arity)? else {
        return Err(CliError::Usage("`solve` expects an instance over one structure; use `solve-comb`".into()));
    };
    let use_min = match solver {
        SolverChoice::Min => true,
        SolverChoice::Oracle => false,
        SolverChoice::Auto => min_applicable(inst.structure()),
    };
    let out = if use_min {
        solve_min_closed(&inst)?
    } else {
        solve_oracle_with(&inst, &st.caps)?
    };
    let assignment = match &out {
        tcsp_core::solvers::SolveOutcome::Sat { witness } => {
            let map: serde_json::Map<String, Value> =
                inst.vars().iter().zip(witness).map(|(v, r)| (v.clone(), json!(r))).collect();
            Value::Object(map)
        }
        tcsp_core::solvers::SolveOutcome::Unsat => Value::Null,
    };
    Ok(Outcome {
        positive: out.is_sat(),
        result: json!({
            "solver": if use_min { "min-closed" } else { "oracle" },
            "sat": out.is_sat(),
            "assignment": assignment,
        }),
    })
}

pub fn solve_comb(m: &Manifest, instance: Option<&str>, st: &Settings) -> CliResult<Outcome> {
    let BuiltInstance::Combined(inst) = m.instance(instance, st.caps.arity)? else {
        return Err(CliError::Usage("`solve-comb` expects an instance over two structures".into()));
    };
    let out = solve_combined_oracle_with(&inst, &st.caps)?;
    Ok(Outcome {
        positive: out.is_sat(),
        result: json!({ "solver": "combined-oracle", "outcome": to_value(&out)? }),
    })
}

/// Swaps the two free variables of a binary formula.
fn swapped(phi: &PPFormula) -> CliResult<PPFormula> {
    let atoms = phi
        .atoms()
        .iter()
        .map(|a| {
            let args = a.args.iter().map(|&v| if v < 2 { 1 - v } else { v }).collect();
            Atom::new(a.symbol.clone(), args)
        })
        .collect();
    Ok(PPFormula::new(phi.vars().to_vec(), 2, atoms)?)
}

/// An existential positive definition of `≠` over `a`: a symbol for `≠`,
/// `x < y ∨ y < x` from a symbol for `<`, or a searched pp-definition of
/// either.
fn ep_definition(a: &TemporalStructure) -> CliResult<EpDefinition> {
    let neq = builtin("!=")?;
    let lt = builtin("<")?;
    let find = |rel: &TemporalRelation| a.relations().iter().find(|(_, r)| r == rel).map(|(s, _)| s.clone());
    let ep = if let Some(s) = find(&neq) {
        EpDefinition::new(vec![PPFormula::new(vec!["x".into(), "y".into()], 2, vec![Atom::new(s, vec![0, 1])])?])?
    } else if let Some(s) = find(&lt) {
        let d = PPFormula::new(vec!["x".into(), "y".into()], 2, vec![Atom::new(s, vec![0, 1])])?;
        EpDefinition::new(vec![d.clone(), swapped(&d)?])?
    } else if let SearchOutcome::Found { formula } = bounded_ppdef_search(a, &neq, 1, 2)? {
        EpDefinition::new(vec![formula])?
    } else if let SearchOutcome::Found { formula } = bounded_ppdef_search(a, &lt, 1, 2)? {
        EpDefinition::new(vec![formula.clone(), swapped(&formula)?])?
    } else {
        return Err(Error::Contract(format!("no existential positive definition of ≠ found over `{}`", a.name())).into());
    };
    ep.validate(a)?;
    Ok(ep)
}

/// Independence of `≠` for one side: certified by ll or its dual, or
/// checked by random search.
fn independence(a: &TemporalStructure, trials: usize, seed: u64) -> CliResult<Value> {
    match independence_falsifier(a, trials, 5, seed)? {
        IndependenceReport::Counterexample(c) => Err(Error::Contract(format!(
            "≠ is not independent from `{}`: {}",
            a.name(),
            serde_json::to_string(&c)?
        ))
        .into()),
        r => to_value(&r),
    }
}

pub fn combine(m: &Manifest, instance: Option<&str>, trials: usize, st: &Settings) -> CliResult<Outcome> {
    let BuiltInstance::Combined(inst) = m.instance(instance, st.caps.arity)? else {
        return Err(CliError::Usage("`combine` expects an instance over two structures".into()));
    };
    let sides = [
        inst.structure(tcsp_core::solvers::Side::First).clone(),
        inst.structure(tcsp_core::solvers::Side::Second).clone(),
    ];
    let eps = [ep_definition(&sides[0])?, ep_definition(&sides[1])?];
    let indep = [
        independence(&sides[0], trials, st.seed)?,
        independence(&sides[1], trials, st.seed.wrapping_add(1))?,
    ];
    let oracle = OracleSolver { caps: st.caps };
    let min = MinClosedSolver;
    let pick = |a: &TemporalStructure| -> &dyn CspSolver {
        if min_applicable(a) {
            &min
        } else {
            &oracle
        }
    };
    let solvers = [pick(&sides[0]), pick(&sides[1])];
    let report = combine_nelson_oppen(&inst, solvers, [&eps[0], &eps[1]])?;
    Ok(Outcome {
        positive: report.sat,
        result: json!({
            "solvers": [solvers[0].name(), solvers[1].name()],
            "ep_definitions": [eps[0].to_string(), eps[1].to_string()],
            "independence": indep,
            "report": to_value(&report)?,
        }),
    })
}

/// Resolves `--rel`: a library relation, a symbol of the selected
/// structure, or a formula over `x1..xk`.
pub fn relation_arg(
    m: Option<&Manifest>,
    structure: Option<&str>,
    rel: &str,
    arity: Option<usize>,
    st: &Settings,
) -> CliResult<(String, TemporalRelation)> {
    if let (Some(m), true) = (m, is_identifier(rel)) {
        let a = m.structure(structure, st.caps.arity)?;
        return Ok((rel.to_string(), a.lookup(rel)?.clone()));
    }
    Ok((rel.to_string(), parse_relation_arg(rel, arity, st.caps.arity)?))
}

/// Relations to check: the one given by `--rel`, or all of a structure.
fn targets(
    m: Option<&Manifest>,
    structure: Option<&str>,
    rel: Option<&str>,
    arity: Option<usize>,
    st: &Settings,
) -> CliResult<Vec<(String, TemporalRelation)>> {
    match (rel, m) {
        (Some(r), _) => Ok(vec![relation_arg(m, structure, r, arity, st)?]),
        (None, Some(m)) => Ok(m.structure(structure, st.caps.arity)?.relations().to_vec()),
        (None, None) => Err(CliError::Usage("give --rel or a manifest file".into())),
    }
}

pub fn poly_check(
    m: Option<&Manifest>,
    structure: Option<&str>,
    op: &str,
    rel: Option<&str>,
    arity: Option<usize>,
    st: &Settings,
) -> CliResult<Outcome> {
    let op: OpSpec = op.parse()?;
    let mut rows = Vec::new();
    let mut all = true;
    for (name, r) in targets(m, structure, rel, arity, st)? {
        let cex = preservation_counterexample(op, &r);
        all &= cex.is_none();
        rows.push(json!({
            "relation": name,
            "preserved": cex.is_none(),
            "counterexample": to_value(&cex)?,
        }));
    }
    Ok(Outcome {
        positive: all,
        result: json!({ "op": op.to_string(), "preserved": all, "relations": rows }),
    })
}

pub fn parse_form(name: &str) -> CliResult<Form> {
    Form::SYNTHESIZABLE
        .into_iter()
        .chain([Form::Ll])
        .find(|f| f.name() == name)
        .ok_or_else(|| CliError::Usage(format!("unknown form `{name}`")))
}

pub fn normal_form(
    m: Option<&Manifest>,
    structure: Option<&str>,
    form: Form,
    rel: Option<&str>,
    arity: Option<usize>,
    st: &Settings,
) -> CliResult<Outcome> {
    let mut rows = Vec::new();
    let mut all = true;
    for (name, r) in targets(m, structure, rel, arity, st)? {
        let row = if form == Form::Ll {
            // There is no synthesis for ll. The reduced CNF may fail the
            // syntactic check even when ll preserves the relation, so both
            // answers are reported and the verdict follows preservation.
            let cnf = r.to_cnf();
            let preserved = preserves(OpSpec::LL, &r);
            all &= preserved;
            json!({
                "relation": name,
                "cnf": cnf.to_string(),
                "cnf_in_form": recognize_form(&cnf, form),
                "preserved_by": "ll",
                "in_form": preserved,
            })
        } else {
            let cnf = synthesize_form_with(&r, form, st.caps.arity)?;
            all &= cnf.is_some();
            json!({
                "relation": name,
                "formula": cnf.as_ref().map(|c| c.to_string()),
                "preserved_by": form.op().to_string(),
                "in_form": cnf.is_some(),
            })
        };
        rows.push(row);
    }
    Ok(Outcome {
        positive: all,
        result: json!({ "form": form.name(), "relations": rows }),
    })
}

pub fn ppdef_search(
    m: &Manifest,
    structure: Option<&str>,
    target: &str,
    arity: Option<usize>,
    max_bound: usize,
    max_atoms: usize,
    st: &Settings,
) -> CliResult<Outcome> {
    let a = m.structure(structure, st.caps.arity)?;
    let rel = parse_relation_arg(target, arity, st.caps.arity)?;
    let out = bounded_ppdef_search(&a, &rel, max_bound, max_atoms)?;
    let text = out.formula().map(|f| f.to_string());
    Ok(Outcome {
        positive: out.formula().is_some(),
        result: json!({
            "structure": a.name(),
            "target": target,
            "max_bound": max_bound,
            "max_atoms": max_atoms,
            "formula_text": text,
            "outcome": to_value(&out)?,
        }),
    })
}

pub fn extract_rmix(m: &Manifest, structure: Option<&str>, st: &Settings) -> CliResult<Outcome> {
    let a = m.structure(structure, st.caps.arity)?;
    let out = extract_rmix_definition(&a)?;
    let (positive, summary) = match &out {
        ExtractOutcome::Extracted(e) => (
            true,
            json!({
                "formula_text": e.formula.to_string(),
                "validated": e.steps_validated && e.flat_validated != Some(false),
            }),
        ),
        ExtractOutcome::Inapplicable { .. } => (false, json!({})),
    };
    Ok(Outcome {
        positive,
        result: json!({ "structure": a.name(), "summary": summary, "outcome": to_value(&out)? }),
    })
}

pub fn cross_prevention(
    m: &Manifest,
    structure: Option<&str>,
    formula: Option<&str>,
    max_bound: usize,
    max_atoms: usize,
    st: &Settings,
) -> CliResult<Outcome> {
    let a = m.structure(structure, st.caps.arity)?;
    let phi = match formula {
        Some(text) => {
            let free: Vec<String> = ["x", "y", "u", "v"].iter().map(|s| s.to_string()).collect();
            let mut p = Parser::new(text)?;
            let f = p.pp_formula(&free)?;
            p.finish()?;
            Some(f)
        }
        None => search_cross_prevention(&a, max_bound, max_atoms)?,
    };
    let Some(phi) = phi else {
        return Ok(Outcome {
            positive: false,
            result: json!({ "structure": a.name(), "formula": null, "searched": true, "holds": false }),
        });
    };
    let report = check_cross_prevention(&a, &phi)?;
    Ok(Outcome {
        positive: report.holds(),
        result: json!({
            "structure": a.name(),
            "formula": phi.to_string(),
            "searched": formula.is_none(),
            "holds": report.holds(),
            "conditions": to_value(&report)?,
        }),
    })
}
