//! Acceptance run: one PASS/FAIL line per criterion with measured time and
//! the pinned limit. Exits non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use tcsp_core::classify::{classify_combination, classify_temporal, Label, Verdict, Witness};
use tcsp_core::gf2::{chi0_system, Chi0System};
use tcsp_core::normal_form::{synthesize_form, Form};
use tcsp_core::ops::{images, preserves, ConcreteMixTable, OpSpec};
use tcsp_core::order::MinTuple;
use tcsp_core::ppdef::constructions::{le_from_t3, neq_from_t3, over_t3, rmin_le_from_t3, rmix_from_x, rmix_n_inductive, smi_from_t3};
use tcsp_core::ppdef::{check_cross_prevention, extract_rmix_definition, ExtractOutcome};
use tcsp_core::relation::rmix_n_relation;
use tcsp_core::{builtin, enumerate_weak_orders, eval_pp_with, Caps, PPFormula, TemporalRelation, TemporalStructure};

mod common;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn structure(name: &str, symbols: &[&str]) -> TemporalStructure {
    TemporalStructure::from_builtins(name, symbols).unwrap()
}

fn pred(arity: usize, f: impl Fn(&[u8]) -> bool) -> TemporalRelation {
    TemporalRelation::from_predicate(arity, f).unwrap()
}

/// R^mix from its definition: x = y, or z strictly below both.
fn rmix_oracle() -> TemporalRelation {
    pred(3, |t| t[0] == t[1] || (t[2] < t[0] && t[2] < t[1]))
}

/// Ordered Bell numbers by the recurrence a(n) = Σ_k C(n,k) a(n-k).
fn fubini(n: usize) -> u64 {
    let mut a = vec![1u64; n + 1];
    for m in 1..=n {
        let mut binom = 1u64;
        let mut sum = 0u64;
        for k in 1..=m {
            binom = binom * (m - k + 1) as u64 / k as u64;
            sum += binom * a[m - k];
        }
        a[m] = sum;
    }
    a[n]
}

fn c1_enumeration() -> Outcome {
    let expected = [1u64, 3, 13, 75, 541, 4683, 47293, 545835];
    let mut ok = true;
    for n in 1..=8 {
        let got = enumerate_weak_orders(n).unwrap().len() as u64;
        ok &= got == fubini(n) && got == expected[n - 1];
    }
    outcome(ok, "n = 1..8 against recurrence and published counts")
}

fn c2_figure() -> Outcome {
    let expected = [[2, 1, 1, 1], [0, 5, 4, 4], [0, 3, 8, 7], [0, 3, 6, 11]];
    let ok = ConcreteMixTable.grid() == expected;
    outcome(ok, "16 entries exact")
}

fn c3_preservation() -> Outcome {
    let rmix = builtin("Rmix").unwrap();
    let mut ok = [OpSpec::MIN, OpSpec::MI, OpSpec::MX, OpSpec::MIX].iter().all(|&op| preserves(op, &rmix));
    ok &= !preserves(OpSpec::LEX, &rmix) && !preserves(OpSpec::LL, &rmix);
    for n in 3..=5 {
        ok &= preserves(OpSpec::MIX, &rmix_n_relation(n, 6).unwrap());
    }
    outcome(ok, "min/mi/mx/mix true, lex/ll false, mix on R^mix_n for n = 3,4,5")
}

fn c4_grid() -> Outcome {
    let mix = ConcreteMixTable;
    let f = |x: u64, y: u64| mix.apply(mix.apply(x, y), 3 * y);
    // mi realized directly on integers: equal < greater-first < smaller-first
    // within each level.
    let mi = |x: u64, y: u64| match x.cmp(&y) {
        std::cmp::Ordering::Equal => 3 * x,
        std::cmp::Ordering::Greater => 3 * y + 1,
        std::cmp::Ordering::Less => 3 * x + 2,
    };
    let pts: Vec<(u64, u64)> = (0..4).flat_map(|x| (0..4).map(move |y| (x, y))).collect();
    let mut pairs = 0;
    let mut ok = true;
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            pairs += 1;
            ok &= f(p.0, p.1).cmp(&f(q.0, q.1)) == mi(p.0, p.1).cmp(&mi(q.0, q.1));
        }
    }
    ok &= tcsp_core::ops::mi_from_mix_grid_check();
    outcome(ok && pairs == 120, format!("{pairs} point pairs compared"))
}

fn all_ternary() -> Vec<TemporalRelation> {
    let orbits = enumerate_weak_orders(3).unwrap();
    (0u32..1 << orbits.len())
        .map(|bits| {
            let sel = orbits.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, o)| o.clone());
            TemporalRelation::new(3, sel).unwrap()
        })
        .collect()
}

fn c5_normal_forms(rels: &[TemporalRelation]) -> Outcome {
    let bad: usize = Form::SYNTHESIZABLE
        .iter()
        .map(|&form| {
            rels.par_iter()
                .filter(|r| synthesize_form(r, form).unwrap().is_some() != preserves(form.op(), r))
                .count()
        })
        .sum();
    outcome(bad == 0, format!("{} relations x pp/min/mi/mix, {bad} discrepancies", rels.len()))
}

fn c6_implication(rels: &[TemporalRelation]) -> Outcome {
    let violations = rels
        .par_iter()
        .filter(|r| preserves(OpSpec::MX, r) && preserves(OpSpec::MIN, r) && !preserves(OpSpec::MI, r))
        .count();
    outcome(violations == 0, format!("{violations} violations"))
}

fn tuples(v: &[[bool; 3]]) -> BTreeSet<MinTuple> {
    v.iter().map(|b| MinTuple::from_bits(b)).collect()
}

fn c7_gf2() -> Outcome {
    let (f, t) = (false, true);
    let rmix_space = tuples(&[[f, f, f], [f, f, t], [t, t, f], [t, t, t]]);
    let x_space = tuples(&[[f, f, f], [t, t, f], [t, f, t], [f, t, t]]);
    let space = |name: &str| match chi0_system(&builtin(name).unwrap()) {
        Chi0System::Linear(s) => Some(s.solution_tuples()),
        Chi0System::NotLinear { .. } => None,
    };
    let rmix_ok = space("Rmix") == Some(rmix_space);
    let x_ok = space("X") == Some(x_space);
    let betw = builtin("Betw").unwrap();
    let betw_ok = !preserves(OpSpec::MX, &betw)
        && match chi0_system(&betw) {
            Chi0System::NotLinear { a, b } => {
                let chi0 = betw.chi0();
                chi0.contains(&a) && chi0.contains(&b) && !chi0.iter().any(|m| m.mask() == a.mask() ^ b.mask())
            }
            Chi0System::Linear(_) => false,
        };
    outcome(rmix_ok && x_ok && betw_ok, format!("R^mix {rmix_ok}, X {x_ok}, Betw not linear {betw_ok}"))
}

fn timed_eq(phi: &PPFormula, a: &TemporalStructure, want: &TemporalRelation, slowest: &mut Duration) -> bool {
    let t = Instant::now();
    let caps = Caps {
        pp_vars: 16,
        ..Caps::default()
    };
    let ok = eval_pp_with(phi, a, &caps).unwrap() == *want;
    *slowest = (*slowest).max(t.elapsed());
    ok && t.elapsed() < Duration::from_secs(1)
}

fn c8_constructions() -> Outcome {
    let t3 = structure("T", &["T3"]);
    let mut slowest = Duration::ZERO;
    let mut ok = timed_eq(&le_from_t3(), &t3, &pred(2, |t| t[0] <= t[1]), &mut slowest);
    ok &= timed_eq(&neq_from_t3(), &t3, &pred(2, |t| t[0] != t[1]), &mut slowest);
    ok &= timed_eq(&over_t3(&rmin_le_from_t3()).unwrap(), &t3, &pred(3, |t| t[0] >= t[1] || t[0] >= t[2]), &mut slowest);
    ok &= timed_eq(&over_t3(&smi_from_t3()).unwrap(), &t3, &pred(3, |t| t[0] != t[1] || t[0] >= t[2]), &mut slowest);
    ok &= timed_eq(&rmix_from_x(), &structure("X", &["X"]), &rmix_oracle(), &mut slowest);
    let rm = structure("M", &["<", "Rmix"]);
    for n in 4..=5 {
        let want = pred(n, |t| t[0] == t[1] || t[2..].iter().any(|&z| z < t[0] && z < t[1]));
        ok &= timed_eq(&rmix_n_inductive(n).unwrap(), &rm, &want, &mut slowest);
    }
    outcome(ok, format!("7 formulas, slowest {slowest:.2?} (limit 1s each)"))
}

fn c9_cross() -> Outcome {
    let phi = |sym: &str| PPFormula::build(&["x", "y", "u", "v"], &[], &[(sym, &["u", "x"]), (sym, &["y", "v"])]).unwrap();
    let lt = check_cross_prevention(&structure("A", &["<"]), &phi("<")).unwrap().holds();
    let le = check_cross_prevention(&structure("A", &["<="]), &phi("<=")).unwrap().holds();
    outcome(lt && !le, format!("(Q;<) {lt}, (Q;<=) {le}"))
}

fn c10_solvers() -> Outcome {
    let pool = common::exhaustive_min_pool();
    let pool_ok = pool.par_iter().filter(|i| common::min_agrees(i)).count();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let random: Vec<_> = (0..1000).map(|_| common::random_min_instance(&mut rng, 7)).collect();
    let random_ok = random.par_iter().filter(|i| common::min_agrees(i)).count();

    let (sides, eps) = common::combination_sides();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let combined: Vec<_> = (0..500).map(|_| common::random_combined(&mut rng, &sides, 6)).collect();
    let results: Vec<(bool, f64)> = combined
        .par_iter()
        .map(|inst| {
            let (report, want) = common::combine_vs_oracle(inst, &eps);
            let n = inst.num_vars() as f64;
            (report.sat == want, report.solver_calls as f64 / n.powi(3))
        })
        .collect();
    let comb_ok = results.iter().filter(|r| r.0).count();
    let c = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let ok = pool_ok == pool.len() && random_ok == 1000 && comb_ok == 500 && c <= 4.0;
    outcome(
        ok,
        format!(
            "min pool {pool_ok}/{}, random {random_ok}/1000, combined {comb_ok}/500, calls <= c n^3 with c = {c:.3} (limit 4)",
            pool.len()
        ),
    )
}

/// Re-checks every witness of a verdict independently of the classifier.
fn witnesses_valid(v: &Verdict, a: &TemporalStructure) -> bool {
    v.witnesses.iter().all(|w| match w {
        Witness::Preserved { op, relations } => {
            let op: OpSpec = op.parse().unwrap();
            relations.iter().all(|s| preserves(op, a.lookup(s).unwrap()))
        }
        Witness::Constant { .. } => a.relations().iter().all(|(_, r)| r.is_empty() || r.contains_constant()),
        Witness::Failed {
            op,
            relation,
            counterexample,
        } => {
            let r = a.lookup(relation).unwrap();
            match counterexample {
                None => !r.contains_constant(),
                Some(c) => {
                    let op: OpSpec = op.parse().unwrap();
                    r.contains(&c.s) && r.contains(&c.t) && !r.contains(&c.image) && images(op, &c.s, &c.t).contains(&c.image)
                }
            }
        }
        _ => true,
    })
}

fn c11_classifier() -> Outcome {
    let mut ok = true;
    let singles: [(&[&str], Label); 6] = [
        (&["Betw"], Label::NpComplete),
        (&["T3"], Label::NpComplete),
        (&["<", "Rmin_le", "!="], Label::NpComplete),
        (&["<"], Label::P),
        (&["<", "Rmin_le"], Label::P),
        (&["<", "Rmix"], Label::P),
    ];
    for (syms, want) in singles {
        let a = structure("A", syms);
        let v = classify_temporal(&a).unwrap();
        ok &= v.label == want && witnesses_valid(&v, &a);
        if want == Label::NpComplete {
            ok &= v.witnesses.len() == 9;
        }
    }
    let combos: [(&[&str], &[&str], Label); 4] = [
        (&["<", "<="], &["<", "<="], Label::P),
        (&["<="], &["<="], Label::P),
        (&["<", "Rmix"], &["<"], Label::NpComplete),
        (&["!="], &["Betw"], Label::NpComplete),
    ];
    for (s1, s2, want) in combos {
        let (a1, a2) = (structure("A1", s1), structure("A2", s2));
        let out = classify_combination(&a1, &a2).unwrap();
        let Some(v) = out.verdict() else {
            ok = false;
            continue;
        };
        ok &= v.label == want;
        for w in &v.witnesses {
            if let Witness::Side { side, verdict } = w {
                ok &= witnesses_valid(verdict, if *side == 1 { &a1 } else { &a2 });
            }
        }
    }
    outcome(ok, "6 single structures, 4 combinations, witnesses re-checked")
}

fn c12_extractor() -> Outcome {
    let caps = Caps {
        pp_vars: 24,
        ..Caps::default()
    };
    let mut ok = true;
    let mut routes = Vec::new();
    for syms in [&["<", "Rmi"][..], &["X"], &["<", "T3"]] {
        let a = structure("A", syms);
        match extract_rmix_definition(&a).unwrap() {
            ExtractOutcome::Extracted(e) => {
                ok &= e.conditional_on.is_empty() && eval_pp_with(&e.formula, &a, &caps).unwrap() == rmix_oracle();
                routes.push(format!("{:?}", e.route));
            }
            ExtractOutcome::Inapplicable { .. } => ok = false,
        }
    }
    let le = structure("A", &["<", "<="]);
    ok &= matches!(extract_rmix_definition(&le).unwrap(), ExtractOutcome::Inapplicable { .. });
    outcome(ok, format!("routes {}, (Q;<,<=) inapplicable", routes.join("/")))
}

fn main() {
    let mut failures = 0;
    let mut run = |id: usize, name: &str, limit: Option<Duration>, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let mut o = f();
        let elapsed = t.elapsed();
        if let Some(l) = limit {
            if elapsed > l {
                o.pass = false;
                o.detail.push_str(&format!("; over time limit {l:?}"));
            }
        }
        let limit_text = limit.map(|l| format!(" (limit {l:?})")).unwrap_or_default();
        println!(
            "[{}] {id:>2} {name}: {} [{elapsed:.2?}{limit_text}]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.pass {
            failures += 1;
        }
    };
    let secs = Duration::from_secs;
    run(1, "enumeration counts", Some(secs(5)), &mut c1_enumeration);
    run(2, "concrete mix table", None, &mut c2_figure);
    run(3, "preservation battery", Some(secs(30)), &mut c3_preservation);
    run(4, "mi from mix on the 4x4 grid", None, &mut c4_grid);
    let rels = all_ternary();
    run(5, "normal-form equivalence sweep", Some(secs(600)), &mut || c5_normal_forms(&rels));
    run(6, "mx and min imply mi", None, &mut || c6_implication(&rels));
    run(7, "GF(2) systems", None, &mut c7_gf2);
    run(8, "constructive pp-definitions", None, &mut c8_constructions);
    run(9, "cross prevention", None, &mut c9_cross);
    run(10, "solver equivalences", None, &mut c10_solvers);
    run(11, "classifier battery", Some(secs(60)), &mut c11_classifier);
    run(12, "extractor self-validation", None, &mut c12_extractor);
    println!("acceptance: {} of 12 criteria passed", 12 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
