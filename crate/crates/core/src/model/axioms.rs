//! Exhaustive evaluation of the unity, non-contingency, and weak
//! supplementation axioms over a [`FiniteModel`], plus the aggregate
//! classification procedure built on top of them.
//!
//! Unity is the schema
//!
//! ```text
//! forall x,y,z,t:  P(x,y,t) -> ( P(z,y,t) <-> B(x,z,t) )
//! ```
//!
//! where `P` is a part-whole kind (evaluated with subsumption) and `B` the
//! binding relation. `B` is reflexive by convention: `B(x,x,t)` holds
//! implicitly, so a whole with a single part satisfies unity and the missing
//! supplement is reported separately by [`check_weak_supplementation`].
//!
//! Non-contingency is the schema
//!
//! ```text
//! not forall x,z,t:  B(x,z,t) <-> exists y ( P(x,y,t) & P(z,y,t) )
//! ```
//!
//! evaluated literally over the explicit binding tuples (no reflexive
//! convention here): it is satisfied as soon as one witness pair breaks the
//! biconditional in either direction.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{EntityId, FiniteModel, RelationKind, TimePoint, Tuple};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AxiomError {
    #[error("`{0}` is not a part-whole relation kind")]
    NotParthoodKind(RelationKind),
    #[error("`{0}` is not a binding relation kind")]
    NotBindingKind(RelationKind),
    #[error("unknown entity `{0}`")]
    UnknownWhole(EntityId),
}

/// Which half of the unity biconditional failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FailureDirection {
    /// `P(z,y,t)` holds but `B(x,z,t)` does not: co-parts without a bond.
    #[serde(rename = "co-part-without-binding")]
    CoPartWithoutBinding,
    /// `B(x,z,t)` holds but `P(z,y,t)` does not: a bond reaching outside the whole.
    #[serde(rename = "binding-outside-whole")]
    BindingOutsideWhole,
}

impl std::fmt::Display for FailureDirection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FailureDirection::CoPartWithoutBinding => "co-part without binding",
            FailureDirection::BindingOutsideWhole => "binding outside the whole",
        })
    }
}

/// A failing assignment of the unity schema.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UnityCounterexample {
    pub x: EntityId,
    pub whole: EntityId,
    pub z: EntityId,
    pub time: TimePoint,
    pub direction: FailureDirection,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnityResult {
    pub sat: bool,
    pub counterexamples: Vec<UnityCounterexample>,
}

impl UnityResult {
    /// Restriction of this result to counterexamples naming one whole.
    pub fn for_whole(&self, whole: &EntityId) -> UnityResult {
        let counterexamples: Vec<_> = self
            .counterexamples
            .iter()
            .filter(|c| &c.whole == whole)
            .cloned()
            .collect();
        UnityResult {
            sat: counterexamples.is_empty(),
            counterexamples,
        }
    }
}

/// Which half of the non-contingency biconditional the witness breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WitnessDirection {
    /// Bound without sharing any whole.
    #[serde(rename = "bound-without-common-whole")]
    BoundWithoutCommonWhole,
    /// Sharing a whole without being bound.
    #[serde(rename = "co-parts-without-binding")]
    CoPartsWithoutBinding,
}

impl std::fmt::Display for WitnessDirection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            WitnessDirection::BoundWithoutCommonWhole => "bound without a common whole",
            WitnessDirection::CoPartsWithoutBinding => "co-parts without binding",
        })
    }
}

/// A pair breaking the `B <-> co-parthood` equivalence at some time.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NonContingencyWitness {
    pub x: EntityId,
    pub z: EntityId,
    pub time: TimePoint,
    pub direction: WitnessDirection,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonContingencyResult {
    /// True iff at least one witness breaks the biconditional, i.e. the
    /// binding relation is not merely equivalent to co-parthood.
    pub sat: bool,
    pub witnesses: Vec<NonContingencyWitness>,
}

/// A proper part with no disjoint companion part in the same whole.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    pub part: EntityId,
    pub whole: EntityId,
    pub time: TimePoint,
}

/// Parts of each whole at each time, under subsumption of `parthood`.
fn parts_by_whole_time(
    model: &FiniteModel,
    parthood: RelationKind,
) -> BTreeMap<(EntityId, TimePoint), BTreeSet<EntityId>> {
    let mut map: BTreeMap<(EntityId, TimePoint), BTreeSet<EntityId>> = BTreeMap::new();
    for t in model.tuples_under(parthood) {
        map.entry((t.second.clone(), t.time))
            .or_default()
            .insert(t.first.clone());
    }
    map
}

fn binding_set(model: &FiniteModel, binding: RelationKind) -> BTreeSet<(EntityId, EntityId, TimePoint)> {
    model
        .tuples_under(binding)
        .map(|t| (t.first.clone(), t.second.clone(), t.time))
        .collect()
}

fn check_kinds(parthood: RelationKind, binding: RelationKind) -> Result<(), AxiomError> {
    if !parthood.is_parthood_family() {
        return Err(AxiomError::NotParthoodKind(parthood));
    }
    if !binding.is_binding() {
        return Err(AxiomError::NotBindingKind(binding));
    }
    Ok(())
}

/// Evaluates the unity schema by exhaustive enumeration.
pub fn eval_unity(
    model: &FiniteModel,
    parthood: RelationKind,
    binding: RelationKind,
) -> Result<UnityResult, AxiomError> {
    check_kinds(parthood, binding)?;
    let parts = parts_by_whole_time(model, parthood);
    let bonds = binding_set(model, binding);

    let mut counterexamples = BTreeSet::new();
    for ((whole, time), members) in &parts {
        for x in members {
            // P(z,y,t) -> B(x,z,t); x = z exempt via the reflexive convention
            for z in members {
                if z != x && !bonds.contains(&(x.clone(), z.clone(), *time)) {
                    counterexamples.insert(UnityCounterexample {
                        x: x.clone(),
                        whole: whole.clone(),
                        z: z.clone(),
                        time: *time,
                        direction: FailureDirection::CoPartWithoutBinding,
                    });
                }
            }
        }
        // B(x,z,t) -> P(z,y,t) for every x in the whole
        for (bx, bz, btime) in &bonds {
            if btime == time && members.contains(bx) && !members.contains(bz) {
                counterexamples.insert(UnityCounterexample {
                    x: bx.clone(),
                    whole: whole.clone(),
                    z: bz.clone(),
                    time: *time,
                    direction: FailureDirection::BindingOutsideWhole,
                });
            }
        }
    }

    Ok(UnityResult {
        sat: counterexamples.is_empty(),
        counterexamples: counterexamples.into_iter().collect(),
    })
}

/// Evaluates the non-contingency schema literally over explicit tuples.
pub fn eval_noncontingency(
    model: &FiniteModel,
    parthood: RelationKind,
    binding: RelationKind,
) -> Result<NonContingencyResult, AxiomError> {
    check_kinds(parthood, binding)?;
    let parts = parts_by_whole_time(model, parthood);
    let bonds = binding_set(model, binding);

    // co-parthood pairs per time, diagonal included: exists y P(x,y,t) & P(z,y,t)
    let mut co_parts: BTreeSet<(EntityId, EntityId, TimePoint)> = BTreeSet::new();
    for ((_, time), members) in &parts {
        for x in members {
            for z in members {
                co_parts.insert((x.clone(), z.clone(), *time));
            }
        }
    }

    let mut witnesses = BTreeSet::new();
    for bond in &bonds {
        if !co_parts.contains(bond) {
            witnesses.insert(NonContingencyWitness {
                x: bond.0.clone(),
                z: bond.1.clone(),
                time: bond.2,
                direction: WitnessDirection::BoundWithoutCommonWhole,
            });
        }
    }
    for pair in &co_parts {
        if !bonds.contains(pair) {
            witnesses.insert(NonContingencyWitness {
                x: pair.0.clone(),
                z: pair.1.clone(),
                time: pair.2,
                direction: WitnessDirection::CoPartsWithoutBinding,
            });
        }
    }

    Ok(NonContingencyResult {
        sat: !witnesses.is_empty(),
        witnesses: witnesses.into_iter().collect(),
    })
}

/// Flags every proper part lacking a disjoint supplement.
///
/// Overlap is computed from the model's explicit part-whole tuples at the
/// same time with reflexive closure only: `O(z,x)` iff some `w` is part of
/// both, where every entity counts as part of itself.
pub fn check_weak_supplementation(model: &FiniteModel) -> Vec<Violation> {
    // parthood facts per time, reflexive closure added lazily via the check
    let mut parthood_at: BTreeMap<TimePoint, BTreeSet<(EntityId, EntityId)>> = BTreeMap::new();
    for t in model.tuples_under(RelationKind::Parthood) {
        parthood_at
            .entry(t.time)
            .or_default()
            .insert((t.first.clone(), t.second.clone()));
    }

    let part_of = |p: &EntityId, w: &EntityId, time: TimePoint| -> bool {
        p == w
            || parthood_at
                .get(&time)
                .is_some_and(|s| s.contains(&(p.clone(), w.clone())))
    };
    let overlap = |a: &EntityId, b: &EntityId, time: TimePoint| -> bool {
        model
            .entities()
            .any(|w| part_of(&w.id, a, time) && part_of(&w.id, b, time))
    };

    let proper: Vec<&Tuple> = model
        .tuples_under(RelationKind::ProperParthood)
        .collect();

    let mut violations = BTreeSet::new();
    for pp in &proper {
        let supplemented = proper.iter().any(|other| {
            other.time == pp.time
                && other.second == pp.second
                && !overlap(&other.first, &pp.first, pp.time)
        });
        if !supplemented {
            violations.insert(Violation {
                part: pp.first.clone(),
                whole: pp.second.clone(),
                time: pp.time,
            });
        }
    }
    violations.into_iter().collect()
}

/// Verdict classes of the elimination procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AggregateClass {
    FunctionalWhole,
    Collective,
    MereSet,
    ContingentSum,
}

impl AggregateClass {
    pub fn name(self) -> &'static str {
        match self {
            AggregateClass::FunctionalWhole => "FunctionalWhole",
            AggregateClass::Collective => "Collective",
            AggregateClass::MereSet => "MereSet",
            AggregateClass::ContingentSum => "ContingentSum",
        }
    }
}

impl std::fmt::Display for AggregateClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A classification plus the clause-by-clause evidence that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AggregateDecision {
    pub class: AggregateClass,
    pub evidence: Vec<String>,
}

/// Decides whether `whole` is a mere set, a collective, a functional whole,
/// or a contingent sum, in that elimination order.
///
/// - clause (i): nothing relates into the whole -> `MereSet`;
/// - clause (ii): only membership relates into it and the members share a
///   common kind tag -> `Collective`;
/// - clause (iii): unity and non-contingency both satisfied, and unity holds
///   at every time point where the whole has parts -> `FunctionalWhole`
///   (an intrinsic whole under the binding relation);
/// - clause (iv): everything else -> `ContingentSum`.
pub fn classify_aggregate(
    model: &FiniteModel,
    whole: &EntityId,
    unity: &UnityResult,
    noncontingency: &NonContingencyResult,
) -> Result<AggregateDecision, AxiomError> {
    if !model.contains_entity(whole) {
        return Err(AxiomError::UnknownWhole(whole.clone()));
    }

    let incoming: Vec<&Tuple> = model
        .tuples()
        .filter(|t| {
            &t.second == whole && (t.kind.is_parthood_family() || t.kind.is_binding())
        })
        .collect();

    if incoming.is_empty() {
        return Ok(AggregateDecision {
            class: AggregateClass::MereSet,
            evidence: vec![format!(
                "clause (i): no part-whole or binding tuples into `{whole}`"
            )],
        });
    }

    let all_membership = incoming.iter().all(|t| t.kind == RelationKind::Membership);
    if all_membership {
        let member_kinds: BTreeSet<&str> = incoming
            .iter()
            .filter_map(|t| model.entity(&t.first).map(|e| e.kind.as_str()))
            .collect();
        if member_kinds.len() == 1 {
            let role = member_kinds.iter().next().unwrap();
            if !role.is_empty() {
                return Ok(AggregateDecision {
                    class: AggregateClass::Collective,
                    evidence: vec![format!(
                        "clause (ii): parts relate to `{whole}` only via membership and share role tag `{role}`"
                    )],
                });
            }
        }
    }

    // times at which the whole has parts at all
    let exist_times: BTreeSet<TimePoint> = incoming.iter().map(|t| t.time).collect();
    let failing_times: BTreeSet<TimePoint> = unity
        .counterexamples
        .iter()
        .filter(|c| &c.whole == whole)
        .map(|c| c.time)
        .collect();
    let unity_everywhere = failing_times.is_empty();

    if unity.sat && noncontingency.sat && unity_everywhere {
        return Ok(AggregateDecision {
            class: AggregateClass::FunctionalWhole,
            evidence: vec![format!(
                "clause (iii): unity holds at all {} time point(s) where `{whole}` has parts, and the binding relation is not merely co-parthood",
                exist_times.len()
            )],
        });
    }

    let mut evidence = Vec::new();
    if !unity_everywhere {
        evidence.push(format!(
            "clause (iv): unity fails at {} of {} time point(s) where `{whole}` has parts",
            failing_times.len(),
            exist_times.len()
        ));
    } else if !unity.sat {
        evidence.push("clause (iv): the supplied unity result is unsatisfied".to_string());
    }
    if !noncontingency.sat {
        evidence.push(
            "clause (iv): binding is equivalent to co-parthood everywhere (merely contingent sum)"
                .to_string(),
        );
    }
    Ok(AggregateDecision {
        class: AggregateClass::ContingentSum,
        evidence,
    })
}
