use tcsp_core::classify::{
    classify_combination, classify_temporal, has_binary_injective, BinaryInjective, CombinationOutcome, Label,
    VerdictRoute, Witness,
};
use tcsp_core::ppdef::search_cross_prevention;
use tcsp_core::{eval_pp, PPFormula, TemporalStructure};

fn s(name: &str, symbols: &[&str]) -> TemporalStructure {
    TemporalStructure::from_builtins(name, symbols).unwrap()
}

fn label(a: &TemporalStructure) -> Label {
    classify_temporal(a).unwrap().label
}

fn comb(a: &TemporalStructure, b: &TemporalStructure) -> (Label, VerdictRoute) {
    match classify_combination(a, b).unwrap() {
        CombinationOutcome::Verdict(v) => (v.label, v.route),
        other => panic!("{other:?}"),
    }
}

#[test]
fn single_structure_battery() {
    assert_eq!(label(&s("A", &["Betw"])), Label::NpComplete);
    assert_eq!(label(&s("A", &["T3"])), Label::NpComplete);
    assert_eq!(label(&s("A", &["<", "Rmin_le", "!="])), Label::NpComplete);
    assert_eq!(label(&s("A", &["<"])), Label::P);
    assert_eq!(label(&s("A", &["<", "Rmin_le"])), Label::P);
    assert_eq!(label(&s("A", &["<", "Rmix"])), Label::P);
    assert_eq!(label(&s("A", &["Cycl"])), Label::NpComplete);
}

#[test]
fn np_verdicts_carry_full_matrix() {
    let v = classify_temporal(&s("A", &["<", "Rmin_le", "!="])).unwrap();
    let ops: Vec<&str> = v
        .witnesses
        .iter()
        .map(|w| match w {
            Witness::Failed { op, .. } => op.as_str(),
            other => panic!("{other:?}"),
        })
        .collect();
    assert_eq!(ops, ["const", "min", "mi", "mx", "ll", "dual-min", "dual-mi", "dual-mx", "dll"]);
}

#[test]
fn p_verdict_names_preserving_operation() {
    let v = classify_temporal(&s("A", &["<", "Rmin_le"])).unwrap();
    assert!(matches!(&v.witnesses[..], [Witness::Preserved { op, .. }] if op == "min"));
    let v = classify_temporal(&s("A", &["<="])).unwrap();
    assert!(matches!(&v.witnesses[..], [Witness::Constant { .. }]));
}

#[test]
fn binary_injective_examples() {
    assert!(matches!(has_binary_injective(&s("A", &["<", "<="])), BinaryInjective::True { .. }));
    assert!(matches!(has_binary_injective(&s("A", &["<", "Rmix"])), BinaryInjective::False { .. }));
    assert!(matches!(has_binary_injective(&s("A", &["!="])), BinaryInjective::True { .. }));
    assert!(matches!(has_binary_injective(&s("A", &["Betw"])), BinaryInjective::True { op } if op == "lex"));
    assert!(matches!(has_binary_injective(&s("A", &["T3"])), BinaryInjective::Unknown { .. }));
}

#[test]
fn combination_battery() {
    assert_eq!(comb(&s("A1", &["<", "<="]), &s("A2", &["<", "<="])), (Label::P, VerdictRoute::BothBinInj));
    assert_eq!(comb(&s("A1", &["<="]), &s("A2", &["<="])), (Label::P, VerdictRoute::BothConstant));
    assert_eq!(comb(&s("A1", &["<", "Rmix"]), &s("A2", &["<"])), (Label::NpComplete, VerdictRoute::NoRoute));
    assert_eq!(comb(&s("A1", &["!="]), &s("A2", &["Betw"])), (Label::NpComplete, VerdictRoute::AllPermsUnion));
    assert_eq!(comb(&s("A1", &["Betw"]), &s("A2", &["<"])), (Label::NpComplete, VerdictRoute::SingleSideHard));
}

#[test]
fn unknown_binary_injective_is_not_guessed() {
    // Tractable through the constant operation, but preserved by none of
    // the operations that decide injective polymorphisms.
    let r = tcsp_core::TemporalRelation::from_predicate(3, |t| {
        t[0] <= t[1] && t[1] <= t[2] && (t[0] == t[1] || t[1] == t[2])
    })
    .unwrap();
    let a1 = TemporalStructure::new("A1").with("R", r).unwrap();
    let bi = has_binary_injective(&a1);
    assert!(matches!(bi, BinaryInjective::Unknown { .. }), "{bi:?}");
    assert_eq!(label(&a1), Label::P);
    let out = classify_combination(&a1, &s("A2", &["<"])).unwrap();
    assert!(matches!(out, CombinationOutcome::NeedsManualAnalysis { .. }), "{out:?}");
}

#[test]
fn combination_is_symmetric() {
    let pool = [
        s("A1", &["<", "<="]),
        s("A2", &["<="]),
        s("A3", &["<", "Rmix"]),
        s("A4", &["!="]),
        s("A5", &["Betw"]),
        s("A6", &["<"]),
        s("A7", &["X"]),
    ];
    for a in &pool {
        for b in &pool {
            if a.name() == b.name() {
                continue;
            }
            let ab = classify_combination(a, b).unwrap();
            let ba = classify_combination(b, a).unwrap();
            match (ab.verdict(), ba.verdict()) {
                (Some(x), Some(y)) => assert_eq!((x.label, x.route), (y.label, y.route), "{} {}", a.name(), b.name()),
                (None, None) => {}
                _ => panic!("asymmetric outcome for {} and {}", a.name(), b.name()),
            }
        }
    }
}

#[test]
fn verdict_stable_under_duplication_and_pp_definable_additions() {
    let battery = [
        s("A", &["Betw"]),
        s("A", &["T3"]),
        s("A", &["<", "Rmin_le", "!="]),
        s("A", &["<"]),
        s("A", &["<", "Rmin_le"]),
        s("A", &["<", "Rmix"]),
    ];
    for a in &battery {
        let base = label(a);
        let (sym, rel) = a.relations()[0].clone();
        let dup = a.clone().with(format!("{sym}_copy"), rel.clone()).unwrap();
        assert_eq!(label(&dup), base);
        // Project the last coordinate (or keep a binary relation as is).
        let k = rel.arity();
        let names: Vec<String> = (0..k).map(|i| format!("v{i}")).collect();
        let free: Vec<&str> = names[..k.max(2) - 1].iter().map(|s| s.as_str()).collect();
        let (free, bound): (Vec<&str>, Vec<&str>) = if k > 2 {
            (free, vec![names[k - 1].as_str()])
        } else {
            (names.iter().map(|s| s.as_str()).collect(), vec![])
        };
        let args: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let phi = PPFormula::build(&free, &bound, &[(sym.as_str(), &args)]).unwrap();
        let defined = eval_pp(&phi, a).unwrap();
        if defined.is_empty() {
            continue;
        }
        let ext = a.clone().with("Defined", defined).unwrap();
        assert_eq!(label(&ext), base, "{:?}", a.relations());
    }
}

#[test]
fn cross_preventing_partners_of_rmix_are_hard() {
    let rmix = s("M", &["<", "Rmix"]);
    for syms in [vec!["<"], vec!["<", "<="], vec!["<", "!="]] {
        let a2 = s("B", &syms);
        if search_cross_prevention(&a2, 0, 2).unwrap().is_some() {
            assert_eq!(comb(&rmix, &a2).0, Label::NpComplete, "{syms:?}");
        }
    }
}
