use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tcsp_core::ops::{preserves_structure, OpSpec};
use tcsp_core::solvers::{solve_combined_oracle, solve_min_closed, solve_oracle, CombinedInstance, Constraint, Instance, Side};
use tcsp_core::TemporalStructure;

mod common;
use common::*;

/// Brute force over all assignments with values in 0..n, independent of
/// the search oracle.
fn brute_force(inst: &Instance) -> bool {
    let n = inst.num_vars();
    let mut vals = vec![0u8; n];
    loop {
        if inst.satisfied_by(&vals).unwrap() {
            return true;
        }
        let mut i = 0;
        loop {
            if i == n {
                return false;
            }
            vals[i] += 1;
            if (vals[i] as usize) < n {
                break;
            }
            vals[i] = 0;
            i += 1;
        }
    }
}

#[test]
fn oracle_agrees_with_brute_force() {
    let a = min_structure();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pool = atoms(&a, 4);
    for _ in 0..300 {
        let k = rng.gen_range(1..=5);
        let cons: Vec<Constraint> = (0..k).map(|_| pool[rng.gen_range(0..pool.len())].clone()).collect();
        let inst = instance(&a, 4, &cons);
        assert_eq!(solve_oracle(&inst).unwrap().is_sat(), brute_force(&inst), "{inst}");
    }
}

#[test]
fn min_solver_matches_oracle_on_exhaustive_small_pool() {
    for inst in exhaustive_min_pool() {
        assert!(min_agrees(&inst), "{inst}");
    }
}

#[test]
fn min_solver_matches_oracle_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut unsat = 0;
    for _ in 0..1000 {
        let inst = random_min_instance(&mut rng, 7);
        assert!(min_agrees(&inst), "{inst}");
        unsat += usize::from(!solve_oracle(&inst).unwrap().is_sat());
    }
    assert!(unsat > 50 && unsat < 950, "unbalanced sample: {unsat} unsat");
}

#[test]
fn combiner_matches_combined_oracle() {
    let (sides, eps) = combination_sides();
    // Independence of ≠ on both sides: ll preserves them.
    assert!(sides.iter().all(|a| preserves_structure(OpSpec::LL, a)));
    for (a, ep) in sides.iter().zip(&eps) {
        ep.validate(a).unwrap();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst_c: f64 = 0.0;
    let mut sat_count = 0;
    for _ in 0..500 {
        let inst = random_combined(&mut rng, &sides, 6);
        let (report, want) = combine_vs_oracle(&inst, &eps);
        assert_eq!(report.sat, want, "{inst}");
        sat_count += usize::from(want);
        let n = inst.num_vars() as f64;
        worst_c = worst_c.max(report.solver_calls as f64 / n.powi(3));
    }
    assert!(worst_c <= 4.0, "call count exceeds 4 n^3: c = {worst_c}");
    assert!(sat_count > 25 && sat_count < 475, "unbalanced sample: {sat_count} sat");
}

#[test]
fn independence_falsifier_finds_counterexample_for_rmix() {
    use tcsp_core::solvers::{independence_falsifier, IndependenceReport};
    let a = TemporalStructure::from_builtins("A", &["<", "Rmix"]).unwrap();
    match independence_falsifier(&a, 2000, 5, 1).unwrap() {
        IndependenceReport::Counterexample(c) => assert!(c.verify(&a).unwrap()),
        other => panic!("{other:?}"),
    }
    let b = TemporalStructure::from_builtins("B", &["<", "<="]).unwrap();
    assert!(matches!(
        independence_falsifier(&b, 10, 5, 1).unwrap(),
        IndependenceReport::Certified { .. }
    ));
}

#[test]
fn combined_oracle_respects_kernels() {
    // A.<(x,y) forces x ≠ y; B.=(x,y) would force x = y.
    let first = TemporalStructure::from_builtins("A", &["<"]).unwrap();
    let second = TemporalStructure::from_builtins("B", &["Eq"]).unwrap();
    let mut inst = CombinedInstance::new(first, second);
    inst.add(Side::First, "<", &["x", "y"]).unwrap();
    assert!(solve_combined_oracle(&inst).unwrap().is_sat());
    inst.add(Side::Second, "Eq", &["x", "y"]).unwrap();
    assert!(!solve_combined_oracle(&inst).unwrap().is_sat());
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn sat_witnesses_satisfy_instance(n in 2usize..=6, picks in proptest::collection::vec(any::<u32>(), 1..8)) {
            let a = min_structure();
            let pool = atoms(&a, n);
            let cons: Vec<Constraint> = picks.iter().map(|&p| pool[p as usize % pool.len()].clone()).collect();
            let inst = instance(&a, n, &cons);
            for out in [solve_oracle(&inst).unwrap(), solve_min_closed(&inst).unwrap()] {
                if let tcsp_core::solvers::SolveOutcome::Sat { witness } = out {
                    prop_assert!(inst.satisfied_by(&witness).unwrap());
                }
            }
        }
    }
}
