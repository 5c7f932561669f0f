//! Instance generators shared by the solver tests and the acceptance run.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use tcsp_core::solvers::{
    combine_nelson_oppen, solve_combined_oracle, solve_min_closed, solve_oracle, CombineReport, CombinedInstance,
    Constraint, CspSolver, EpDefinition, Instance, MinClosedSolver, OracleSolver, Side, SolveOutcome,
};
use tcsp_core::{PPFormula, TemporalStructure};

pub fn min_structure() -> TemporalStructure {
    TemporalStructure::from_builtins("M", &["<", "<=", "Rmin_le", "Rmi"]).unwrap()
}

/// Every atom of `a` over variables `0..n`.
pub fn atoms(a: &TemporalStructure, n: usize) -> Vec<Constraint> {
    let mut out = Vec::new();
    for (sym, r) in a.relations() {
        let k = r.arity();
        for code in 0..n.pow(k as u32) {
            let args = (0..k).map(|i| code / n.pow(i as u32) % n).collect();
            out.push(Constraint::new(sym.clone(), args));
        }
    }
    out
}

pub fn instance(a: &TemporalStructure, n: usize, cons: &[Constraint]) -> Instance {
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let mut inst = Instance::with_vars(a.clone(), &refs).unwrap();
    for c in cons {
        inst.push(c.clone()).unwrap();
    }
    inst
}

/// Whether the min solver and the oracle agree, and a returned witness is valid.
pub fn min_agrees(inst: &Instance) -> bool {
    let got = solve_min_closed(inst).unwrap();
    let want = solve_oracle(inst).unwrap();
    let witness_ok = match &got {
        SolveOutcome::Sat { witness } => inst.satisfied_by(witness).unwrap(),
        SolveOutcome::Unsat => true,
    };
    got.is_sat() == want.is_sat() && witness_ok
}

/// All instances with one or two atoms over four variables.
pub fn exhaustive_min_pool() -> Vec<Instance> {
    let a = min_structure();
    let pool = atoms(&a, 4);
    let mut out = Vec::new();
    for (i, c) in pool.iter().enumerate() {
        out.push(instance(&a, 4, std::slice::from_ref(c)));
        for d in &pool[i..] {
            out.push(instance(&a, 4, &[c.clone(), d.clone()]));
        }
    }
    out
}

pub fn random_min_instance(rng: &mut ChaCha8Rng, max_vars: usize) -> Instance {
    let a = min_structure();
    let n = rng.gen_range(2..=max_vars);
    let pool = atoms(&a, n);
    let k = rng.gen_range(1..=2 * n);
    let cons: Vec<Constraint> = (0..k).map(|_| pool[rng.gen_range(0..pool.len())].clone()).collect();
    instance(&a, n, &cons)
}

/// Two structures preserved by ll, with ep-definitions of `≠`.
pub fn combination_sides() -> ([TemporalStructure; 2], [EpDefinition; 2]) {
    let first = TemporalStructure::from_builtins("A", &["<", "<="]).unwrap();
    let second = TemporalStructure::from_builtins("B", &["!=", "Smi"]).unwrap();
    let ep_lt = EpDefinition::new(vec![
        PPFormula::build(&["x", "y"], &[], &[("<", &["x", "y"])]).unwrap(),
        PPFormula::build(&["x", "y"], &[], &[("<", &["y", "x"])]).unwrap(),
    ])
    .unwrap();
    let ep_neq = EpDefinition::new(vec![PPFormula::build(&["x", "y"], &[], &[("!=", &["x", "y"])]).unwrap()]).unwrap();
    ([first, second], [ep_lt, ep_neq])
}

pub fn random_combined(rng: &mut ChaCha8Rng, sides: &[TemporalStructure; 2], max_vars: usize) -> CombinedInstance {
    let n = rng.gen_range(2..=max_vars);
    let mut inst = CombinedInstance::new(sides[0].clone(), sides[1].clone());
    for i in 0..n {
        inst.var(&format!("v{i}"));
    }
    for (side, a) in [Side::First, Side::Second].into_iter().zip(sides) {
        let pool = atoms(a, n);
        for _ in 0..rng.gen_range(1..=n + 1) {
            inst.push(side, pool[rng.gen_range(0..pool.len())].clone()).unwrap();
        }
    }
    inst
}

/// Runs the combiner (min solver on the first side, oracle on the second)
/// and the combined oracle; returns the report and the oracle's answer.
pub fn combine_vs_oracle(inst: &CombinedInstance, eps: &[EpDefinition; 2]) -> (CombineReport, bool) {
    let min = MinClosedSolver;
    let oracle = OracleSolver::default();
    let solvers: [&dyn CspSolver; 2] = [&min, &oracle];
    let report = combine_nelson_oppen(inst, solvers, [&eps[0], &eps[1]]).unwrap();
    (report, solve_combined_oracle(inst).unwrap().is_sat())
}
