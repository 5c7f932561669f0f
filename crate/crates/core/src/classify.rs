//! Complexity classification of temporal constraint languages and of
//! combinations of two such languages with disjoint signatures.
//!
//! Every verdict carries witnesses that are checked again before the
//! verdict is returned. All "P" and "NP-complete" labels are conditional on
//! P ≠ NP.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ops::{
    has_constant_polymorphism, images, preservation_counterexample, preserves, preserves_structure,
    structure_preserved_by_all_permutations, OpSpec, PreservationWitness,
};
use crate::structure::TemporalStructure;

pub const CAVEAT: &str = "conditional on P ≠ NP";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    P,
    #[serde(rename = "NP-complete")]
    NpComplete,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::P => "P",
            Label::NpComplete => "NP-complete",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictRoute {
    AllPermsUnion,
    BothConstant,
    BothBinInj,
    SingleSideHard,
    /// Used for single structures and for combinations where no tractable
    /// case applies although both sides are tractable.
    NoRoute,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// `op` preserves every listed relation.
    Preserved { op: String, relations: Vec<String> },
    /// Every non-empty relation contains the constant tuples.
    Constant { relations: Vec<String> },
    /// `op` (or the constant operation when `op` is "const") fails on
    /// `relation`, with an orbit pair whose image leaves the relation.
    Failed {
        op: String,
        relation: String,
        counterexample: Option<PreservationWitness>,
    },
    BinaryInjective { side: usize, op: String },
    /// Combined structures are classified as the union of their relations.
    Union { symbols: Vec<String> },
    Side { side: usize, verdict: Box<Verdict> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub label: Label,
    pub route: VerdictRoute,
    pub witnesses: Vec<Witness>,
    pub caveat: String,
}

impl Verdict {
    fn new(label: Label, route: VerdictRoute, witnesses: Vec<Witness>) -> Self {
        Verdict {
            label,
            route,
            witnesses,
            caveat: CAVEAT.to_string(),
        }
    }
}

fn symbols(a: &TemporalStructure) -> Vec<String> {
    a.relations().iter().map(|(s, _)| s.clone()).collect()
}

fn constant_failure(a: &TemporalStructure) -> Option<String> {
    a.relations()
        .iter()
        .find(|(_, r)| !r.is_empty() && !r.contains_constant())
        .map(|(s, _)| s.clone())
}

/// Re-checks a single witness against `a` from the relation data.
fn witness_holds(w: &Witness, a: &TemporalStructure) -> Result<bool> {
    Ok(match w {
        Witness::Preserved { op, relations } => {
            let op = op.parse::<OpSpec>()?;
            relations.iter().try_fold(true, |ok, s| Ok::<_, Error>(ok && preserves(op, a.lookup(s)?)))?
        }
        Witness::Constant { .. } => has_constant_polymorphism(a),
        Witness::Failed {
            op,
            relation,
            counterexample,
        } => {
            let r = a.lookup(relation)?;
            match counterexample {
                None => op == "const" && !r.is_empty() && !r.contains_constant(),
                Some(c) => {
                    let op = op.parse::<OpSpec>()?;
                    r.contains(&c.s)
                        && r.contains(&c.t)
                        && !r.contains(&c.image)
                        && images(op, &c.s, &c.t).contains(&c.image)
                }
            }
        }
        _ => true,
    })
}

/// Classifies `CSP(A)`: in P if `A` has a constant polymorphism or all of
/// its relations are preserved by one of min, mi, mx, ll or a dual of
/// these, NP-complete otherwise.
pub fn classify_temporal(a: &TemporalStructure) -> Result<Verdict> {
    let verdict = if has_constant_polymorphism(a) {
        Verdict::new(
            Label::P,
            VerdictRoute::NoRoute,
            vec![Witness::Constant { relations: symbols(a) }],
        )
    } else {
        let ops = OpSpec::tractable_ops();
        let failures: Vec<Option<(String, PreservationWitness)>> = ops
            .par_iter()
            .map(|&op| {
                a.relations()
                    .iter()
                    .find_map(|(s, r)| preservation_counterexample(op, r).map(|w| (s.clone(), w)))
            })
            .collect();
        match ops.iter().zip(&failures).find(|(_, f)| f.is_none()) {
            Some((op, _)) => Verdict::new(
                Label::P,
                VerdictRoute::NoRoute,
                vec![Witness::Preserved {
                    op: op.to_string(),
                    relations: symbols(a),
                }],
            ),
            None => {
                let mut rows = vec![Witness::Failed {
                    op: "const".into(),
                    relation: constant_failure(a).ok_or_else(|| Error::Internal("constant check disagrees".into()))?,
                    counterexample: None,
                }];
                for (op, f) in ops.iter().zip(failures) {
                    let (relation, w) = f.expect("all operations failed");
                    rows.push(Witness::Failed {
                        op: op.to_string(),
                        relation,
                        counterexample: Some(w),
                    });
                }
                Verdict::new(Label::NpComplete, VerdictRoute::NoRoute, rows)
            }
        }
    };
    for w in &verdict.witnesses {
        if !witness_holds(w, a)? {
            return Err(Error::Internal(format!("witness failed re-validation: {w:?}")));
        }
    }
    Ok(verdict)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "answer", rename_all = "kebab-case")]
pub enum BinaryInjective {
    True { op: String },
    False { reason: String },
    Unknown { reason: String },
}

/// Whether `A` has a binary injective polymorphism, decided where a proof
/// is available: ll and lex (and their duals) are injective; inside the
/// tractable regime, failing ll and its dual rules one out; for relations
/// invariant under all permutations, all injective binary operations act
/// alike, so failing ll is decisive.
pub fn has_binary_injective(a: &TemporalStructure) -> BinaryInjective {
    let injective = [OpSpec::LL, OpSpec::LL.dual(), OpSpec::LEX, OpSpec::LEX.dual()];
    if let Some(op) = injective.into_iter().find(|&op| preserves_structure(op, a)) {
        return BinaryInjective::True { op: op.to_string() };
    }
    if let Some(op) = OpSpec::tractable_ops().into_iter().find(|&op| preserves_structure(op, a)) {
        return BinaryInjective::False {
            reason: format!("preserved by {op} but by neither ll nor dll"),
        };
    }
    if structure_preserved_by_all_permutations(a) {
        return BinaryInjective::False {
            reason: "preserved by all permutations and not by the injective operation ll".into(),
        };
    }
    BinaryInjective::Unknown {
        reason: "not preserved by min, mi, mx, ll, any dual of these, or all permutations".into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum CombinationOutcome {
    Verdict(Verdict),
    NeedsManualAnalysis { reason: String },
}

impl CombinationOutcome {
    pub fn verdict(&self) -> Option<&Verdict> {
        match self {
            CombinationOutcome::Verdict(v) => Some(v),
            CombinationOutcome::NeedsManualAnalysis { .. } => None,
        }
    }
}

/// Classifies the CSP of the generic combination of `a1` and `a2`.
pub fn classify_combination(a1: &TemporalStructure, a2: &TemporalStructure) -> Result<CombinationOutcome> {
    if structure_preserved_by_all_permutations(a1) || structure_preserved_by_all_permutations(a2) {
        let union = TemporalStructure::disjoint_union(format!("{}+{}", a1.name(), a2.name()), a1, a2);
        let mut v = classify_temporal(&union)?;
        v.route = VerdictRoute::AllPermsUnion;
        v.witnesses.insert(0, Witness::Union { symbols: symbols(&union) });
        return Ok(CombinationOutcome::Verdict(v));
    }
    if has_constant_polymorphism(a1) && has_constant_polymorphism(a2) {
        let witnesses = [a1, a2]
            .iter()
            .enumerate()
            .map(|(i, a)| Witness::Side {
                side: i + 1,
                verdict: Box::new(Verdict::new(
                    Label::P,
                    VerdictRoute::NoRoute,
                    vec![Witness::Constant { relations: symbols(a) }],
                )),
            })
            .collect();
        return Ok(CombinationOutcome::Verdict(Verdict::new(
            Label::P,
            VerdictRoute::BothConstant,
            witnesses,
        )));
    }
    let sides = [classify_temporal(a1)?, classify_temporal(a2)?];
    let side_witnesses = |sides: &[Verdict; 2]| -> Vec<Witness> {
        sides
            .iter()
            .enumerate()
            .map(|(i, v)| Witness::Side {
                side: i + 1,
                verdict: Box::new(v.clone()),
            })
            .collect()
    };
    if sides.iter().any(|v| v.label == Label::NpComplete) {
        return Ok(CombinationOutcome::Verdict(Verdict::new(
            Label::NpComplete,
            VerdictRoute::SingleSideHard,
            side_witnesses(&sides),
        )));
    }
    let inj = [has_binary_injective(a1), has_binary_injective(a2)];
    if inj.iter().any(|b| matches!(b, BinaryInjective::False { .. })) {
        return Ok(CombinationOutcome::Verdict(Verdict::new(
            Label::NpComplete,
            VerdictRoute::NoRoute,
            side_witnesses(&sides),
        )));
    }
    if let Some((i, BinaryInjective::Unknown { reason })) = inj.iter().enumerate().find(|(_, b)| matches!(b, BinaryInjective::Unknown { .. })) {
        return Ok(CombinationOutcome::NeedsManualAnalysis {
            reason: format!("binary injective polymorphism of side {} undecided: {reason}", i + 1),
        });
    }
    let mut witnesses = side_witnesses(&sides);
    for (i, b) in inj.iter().enumerate() {
        if let BinaryInjective::True { op } = b {
            witnesses.push(Witness::BinaryInjective { side: i + 1, op: op.clone() });
        }
    }
    Ok(CombinationOutcome::Verdict(Verdict::new(
        Label::P,
        VerdictRoute::BothBinInj,
        witnesses,
    )))
}
