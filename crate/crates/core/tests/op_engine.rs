use std::cmp::Ordering;

use proptest::prelude::*;
use tcsp_core::ops::{
    apply_binary, compare, has_constant_polymorphism, images, mi_from_mix_grid_check, preserved_by_all_permutations,
    preserves, ClosureTable, ConcreteMixTable, Interleaving, OpKind, OpSpec,
};
use tcsp_core::relation::{builtin, builtin_names, rmix_n_relation};
use tcsp_core::{TemporalRelation, TemporalStructure, WeakOrder};

fn wo(r: &[u8]) -> WeakOrder {
    WeakOrder::new(r).unwrap()
}

const ALL_KINDS: [OpKind; 9] = [
    OpKind::Min,
    OpKind::Mi,
    OpKind::Mx,
    OpKind::Mix,
    OpKind::Ll,
    OpKind::Lex,
    OpKind::Pp,
    OpKind::Pr1,
    OpKind::Pr2,
];

/// Independent numeric model: concrete functions on integers realizing each
/// operation, with 0 as the sign threshold. The values are chosen freshly
/// from the definitions rather than from the comparator keys.
fn numeric(kind: OpKind, x: i64, y: i64) -> i64 {
    const W: i64 = 1000;
    match kind {
        OpKind::Min => x.min(y),
        // alpha(a) < beta(a) < gamma(a) < alpha(a + eps): 3a, 3a+1, 3a+2
        OpKind::Mi => {
            if x == y {
                3 * x
            } else if x > y {
                3 * y + 1
            } else {
                3 * x + 2
            }
        }
        OpKind::Mx => {
            if x != y {
                2 * x.min(y)
            } else {
                2 * x + 1
            }
        }
        OpKind::Mix => ConcreteMixTable.apply((x + 100) as u64, (y + 100) as u64) as i64,
        OpKind::Lex => x * W + y,
        OpKind::Ll => {
            if x <= 0 {
                x * W + y - W * W * 10
            } else {
                y * W + x
            }
        }
        OpKind::Pp => {
            if x <= 0 {
                x - W * W
            } else {
                y
            }
        }
        OpKind::Pr1 => x,
        OpKind::Pr2 => y,
    }
}

fn numeric_op(op: OpSpec, x: i64, y: i64) -> i64 {
    if op.dual {
        -numeric(op.kind, -x, -y)
    } else {
        numeric(op.kind, x, y)
    }
}

/// Preservation oracle: enumerates concrete integer tuples in a small
/// window instead of orbit pairs and interleavings.
fn numeric_preserves(op: OpSpec, r: &TemporalRelation) -> bool {
    let n = r.arity();
    let vals: Vec<i64> = (-3..=3).collect();
    let tuples: Vec<Vec<i64>> = (0..vals.len().pow(n as u32))
        .map(|mut c| {
            (0..n)
                .map(|_| {
                    let v = vals[c % vals.len()];
                    c /= vals.len();
                    v
                })
                .collect()
        })
        .filter(|t: &Vec<i64>| r.holds(t))
        .collect();
    tuples.iter().all(|s| {
        tuples.iter().all(|t| {
            let img: Vec<i64> = s.iter().zip(t).map(|(&a, &b)| numeric_op(op, a, b)).collect();
            r.holds(&img)
        })
    })
}

#[test]
fn figure_one_table() {
    let expected = [[2, 1, 1, 1], [0, 5, 4, 4], [0, 3, 8, 7], [0, 3, 6, 11]];
    assert_eq!(ConcreteMixTable.grid(), expected);
}

#[test]
fn mix_comparator_matches_figure_order() {
    let chain = [(1, 0), (0, 1), (0, 0), (2, 1), (1, 2), (1, 1)];
    for w in chain.windows(2) {
        assert_eq!(compare(OpSpec::MIX, w[0], w[1], None).unwrap(), Ordering::Less);
    }
}

#[test]
fn mix_from_figure_examples() {
    let il = |s: Vec<i32>, t: Vec<i32>| Interleaving {
        s_vals: s,
        t_vals: t,
        marker: None,
    };
    let out = apply_binary(OpSpec::MIX, &wo(&[0, 1, 2]), &wo(&[0, 0, 0]), &il(vec![1, 2, 3], vec![0])).unwrap();
    assert_eq!(out, wo(&[0, 0, 0]));
    let out = apply_binary(OpSpec::MIX, &wo(&[0, 1, 2]), &wo(&[2, 1, 0]), &il(vec![0, 1, 2], vec![0, 1, 2])).unwrap();
    assert_eq!(out, wo(&[1, 2, 0]));
    let out = apply_binary(OpSpec::MIN, &wo(&[0, 1]), &wo(&[1, 0]), &il(vec![0, 1], vec![0, 1])).unwrap();
    assert_eq!(out, wo(&[0, 0]));
}

#[test]
fn mi_matches_mix_grid() {
    assert!(mi_from_mix_grid_check());
}

#[test]
fn rmix_battery() {
    let rmix = builtin("Rmix").unwrap();
    for op in [OpSpec::MIN, OpSpec::MI, OpSpec::MX, OpSpec::MIX] {
        assert!(preserves(op, &rmix), "{op}");
    }
    assert!(!preserves(OpSpec::LEX, &rmix));
    assert!(!preserves(OpSpec::LL, &rmix));
    for n in 3..=5 {
        assert!(preserves(OpSpec::MIX, &rmix_n_relation(n, 6).unwrap()), "n = {n}");
    }
}

#[test]
fn lex_image_of_sample_pair() {
    assert_eq!(images(OpSpec::LEX, &wo(&[0, 0, 1]), &wo(&[1, 2, 0])), vec![wo(&[0, 1, 2])]);
}

#[test]
fn symbolic_preservation_matches_numeric_model() {
    for name in builtin_names() {
        let r = builtin(name).unwrap();
        if r.arity() > 3 {
            continue;
        }
        for kind in ALL_KINDS {
            for dual in [false, true] {
                let op = OpSpec { kind, dual };
                assert_eq!(preserves(op, &r), numeric_preserves(op, &r), "{op} on {name}");
            }
        }
    }
}

#[test]
fn comparator_is_weak_order_on_grid() {
    let grid: Vec<(i32, i32)> = (0..4).flat_map(|x| (0..4).map(move |y| (x, y))).collect();
    for kind in ALL_KINDS {
        for dual in [false, true] {
            let op = OpSpec { kind, dual };
            let markers: Vec<Option<i32>> = if op.needs_marker() {
                (-1..=4).map(Some).collect()
            } else {
                vec![None]
            };
            for m in markers {
                let c = |p, q| compare(op, p, q, m).unwrap();
                for &p in &grid {
                    assert_eq!(c(p, p), Ordering::Equal);
                    for &q in &grid {
                        assert_eq!(c(p, q), c(q, p).reverse());
                        for &r in &grid {
                            if c(p, q) != Ordering::Greater && c(q, r) != Ordering::Greater {
                                assert_ne!(c(p, r), Ordering::Greater, "{op} {p:?} {q:?} {r:?}");
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn injective_ops_never_tie_distinct_pairs() {
    let grid: Vec<(i32, i32)> = (0..4).flat_map(|x| (0..4).map(move |y| (x, y))).collect();
    for op in [OpSpec::LEX, OpSpec::LL, OpSpec::LL.dual()] {
        let m = op.needs_marker().then_some(1);
        for &p in &grid {
            for &q in &grid {
                if p != q {
                    assert_ne!(compare(op, p, q, m).unwrap(), Ordering::Equal, "{op}");
                }
            }
        }
    }
}

#[test]
fn every_op_preserves_strict_order() {
    let lt = builtin("<").unwrap();
    for kind in ALL_KINDS {
        for dual in [false, true] {
            let op = OpSpec { kind, dual };
            assert!(preserves(op, &lt), "{op}");
            assert_eq!(images(op, &wo(&[0, 1]), &wo(&[0, 1])), vec![wo(&[0, 1])], "{op}");
        }
    }
}

#[test]
fn projections_preserve_the_library() {
    for name in builtin_names() {
        let r = builtin(name).unwrap();
        assert!(preserves(OpSpec::base(OpKind::Pr1), &r));
        assert!(preserves(OpSpec::base(OpKind::Pr2), &r));
    }
}

#[test]
fn dual_conjugation_on_library() {
    for name in builtin_names() {
        let r = builtin(name).unwrap();
        if r.arity() > 3 {
            continue;
        }
        for kind in ALL_KINDS {
            let op = OpSpec::base(kind);
            assert_eq!(preserves(op.dual(), &r), preserves(op, &r.dual()), "{op} on {name}");
        }
    }
}

#[test]
fn constants_and_permutations() {
    let le = TemporalStructure::from_builtins("A", &["<="]).unwrap();
    let lt = TemporalStructure::from_builtins("A", &["<"]).unwrap();
    let mix = TemporalStructure::from_builtins("A", &["Rmix"]).unwrap();
    assert!(has_constant_polymorphism(&le));
    assert!(!has_constant_polymorphism(&lt));
    assert!(has_constant_polymorphism(&mix));
    assert!(preserved_by_all_permutations(&builtin("!=").unwrap()));
}

fn arb_relation3() -> impl Strategy<Value = u128> {
    0u128..(1 << 13)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn closure_table_agrees_with_direct(bits in arb_relation3(), k in 0usize..9, dual in any::<bool>()) {
        let op = OpSpec { kind: ALL_KINDS[k], dual };
        let table = ClosureTable::new(op, 3).unwrap();
        let r = table.relation_of(bits);
        prop_assert_eq!(table.preserves_bits(bits), preserves(op, &r));
    }

    #[test]
    fn dual_conjugation_random(bits in arb_relation3(), k in 0usize..9) {
        let op = OpSpec::base(ALL_KINDS[k]);
        let table = ClosureTable::new(op, 3).unwrap();
        let r = table.relation_of(bits);
        prop_assert_eq!(preserves(op.dual(), &r), preserves(op, &r.dual()));
    }
}
