//! Finite, time-indexed relational models and the axioms evaluated over them.
//!
//! A [`FiniteModel`] is a set of entities plus a finite set of typed relation
//! tuples indexed by discrete time points. The axiom checkers in [`axioms`]
//! (unity, non-contingency, weak supplementation, aggregate classification)
//! are all exhaustive enumerations over this structure; nothing here does
//! theorem proving.

pub mod axioms;
pub mod text;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Discrete time point; valid values are `0..horizon`.
pub type TimePoint = u32;

/// Opaque entity identifier, unique within a model.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntityId(pub String);

impl EntityId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for EntityId {
    fn from(s: &str) -> Self {
        Self(s.to_string())
    }
}

/// A member of the model's domain.
///
/// `level` is an optional granularity stratum (smaller = coarser): wholes
/// normally reside one level above their parts. `kind` is a free tag
/// (`file`, `program`, `module-collection`, `process`, ...) consulted by the
/// domain/range checks and by the collective role test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entity {
    pub id: EntityId,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<i32>,
    pub kind: String,
}

impl Entity {
    pub fn new(id: impl Into<String>, label: impl Into<String>, kind: impl Into<String>) -> Self {
        Self {
            id: EntityId::new(id),
            label: label.into(),
            level: None,
            kind: kind.into(),
        }
    }

    pub fn with_level(mut self, level: i32) -> Self {
        self.level = Some(level);
        self
    }
}

/// The fixed vocabulary of relation kinds.
///
/// The part-whole kinds form a small taxonomy rooted at [`Parthood`]; the
/// functional-part refinements sit under [`ProperParthood`]. `Binding` is the
/// one horizontal kind: the unifying relation among co-parts, labelled per
/// model by [`FiniteModel::binding_name`].
///
/// [`Parthood`]: RelationKind::Parthood
/// [`ProperParthood`]: RelationKind::ProperParthood
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum RelationKind {
    #[serde(rename = "parthood")]
    Parthood,
    #[serde(rename = "proper-parthood")]
    ProperParthood,
    #[serde(rename = "structural-parthood")]
    StructuralParthood,
    #[serde(rename = "involvement")]
    Involvement,
    #[serde(rename = "membership")]
    Membership,
    #[serde(rename = "constitution")]
    Constitution,
    #[serde(rename = "genuineFP")]
    GenuineFp,
    #[serde(rename = "replaceableFP")]
    ReplaceableFp,
    #[serde(rename = "persistentFP")]
    PersistentFp,
    #[serde(rename = "constituentFP")]
    ConstituentFp,
    #[serde(rename = "binding")]
    Binding,
}

impl RelationKind {
    pub const ALL: &'static [RelationKind] = &[
        RelationKind::Parthood,
        RelationKind::ProperParthood,
        RelationKind::StructuralParthood,
        RelationKind::Involvement,
        RelationKind::Membership,
        RelationKind::Constitution,
        RelationKind::GenuineFp,
        RelationKind::ReplaceableFp,
        RelationKind::PersistentFp,
        RelationKind::ConstituentFp,
        RelationKind::Binding,
    ];

    /// Immediate supertype in the fixed taxonomy, if any.
    ///
    /// The functional-part kinds specialise proper parthood; everything else
    /// in the part-whole family (including membership and constitution, which
    /// are meronymic rather than mereological) sits directly under the
    /// generic `parthood` root. `binding` stands outside the taxonomy.
    pub fn parent(self) -> Option<RelationKind> {
        use RelationKind::*;
        match self {
            GenuineFp | ReplaceableFp | PersistentFp | ConstituentFp => Some(ProperParthood),
            ProperParthood | StructuralParthood | Involvement | Membership | Constitution => {
                Some(Parthood)
            }
            Parthood | Binding => None,
        }
    }

    /// True iff `self` subsumes `sub` (reflexively).
    pub fn subsumes(self, sub: RelationKind) -> bool {
        let mut cur = Some(sub);
        while let Some(k) = cur {
            if k == self {
                return true;
            }
            cur = k.parent();
        }
        false
    }

    /// Anything under the part-whole root.
    pub fn is_parthood_family(self) -> bool {
        RelationKind::Parthood.subsumes(self)
    }

    /// Kinds subject to irreflexivity and weak supplementation.
    pub fn is_proper_parthood_family(self) -> bool {
        RelationKind::ProperParthood.subsumes(self)
    }

    pub fn is_binding(self) -> bool {
        self == RelationKind::Binding
    }

    /// Stable display name, identical to the text-format spelling.
    pub fn name(self) -> &'static str {
        use RelationKind::*;
        match self {
            Parthood => "parthood",
            ProperParthood => "proper-parthood",
            StructuralParthood => "structural-parthood",
            Involvement => "involvement",
            Membership => "membership",
            Constitution => "constitution",
            GenuineFp => "genuineFP",
            ReplaceableFp => "replaceableFP",
            PersistentFp => "persistentFP",
            ConstituentFp => "constituentFP",
            Binding => "binding",
        }
    }

    pub fn parse(name: &str) -> Option<RelationKind> {
        RelationKind::ALL.iter().copied().find(|k| k.name() == name)
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One time-indexed relation assertion: `kind(first, second, time)`.
///
/// For part-whole kinds the first slot is the part and the second the whole;
/// for `binding` the slots are the two co-parts.
#[derive(
    Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct Tuple {
    pub kind: RelationKind,
    pub first: EntityId,
    pub second: EntityId,
    pub time: TimePoint,
}

impl Tuple {
    pub fn new(
        kind: RelationKind,
        first: impl Into<EntityId>,
        second: impl Into<EntityId>,
        time: TimePoint,
    ) -> Self {
        Self {
            kind,
            first: first.into(),
            second: second.into(),
            time,
        }
    }
}

impl From<String> for EntityId {
    fn from(s: String) -> Self {
        EntityId(s)
    }
}

/// Hard construction failures; a model with any of these is rejected.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("model horizon must be at least 1")]
    HorizonZero,
    #[error("duplicate entity id `{0}`")]
    DuplicateEntity(EntityId),
    #[error("tuple {kind}({first},{second},{time}) refers to unknown entity `{unknown}`")]
    UnknownEntity {
        kind: RelationKind,
        first: EntityId,
        second: EntityId,
        time: TimePoint,
        unknown: EntityId,
    },
    #[error("tuple {kind}({first},{second},{time}) is outside the model horizon {horizon}")]
    TimeOutOfRange {
        kind: RelationKind,
        first: EntityId,
        second: EntityId,
        time: TimePoint,
        horizon: u32,
    },
    #[error("proper-parthood-family tuple {kind}({id},{id},{time}) is reflexive")]
    ReflexiveProperPart {
        kind: RelationKind,
        id: EntityId,
        time: TimePoint,
    },
}

/// Soft discipline violations: reported at construction, never rejected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelIssue {
    /// One endpoint of a tuple carries a granularity level, the other does not.
    LevelMissing { tuple: Tuple, unlevelled: EntityId },
    /// A part-whole tuple whose part does not reside at a strictly finer level
    /// than its whole.
    PartNotFiner { tuple: Tuple },
    /// A binding tuple whose relata reside at different levels.
    BindingLevelMismatch { tuple: Tuple },
    /// Involvement with a relatum not tagged process-like.
    InvolvementNotProcess { tuple: Tuple, relatum: EntityId },
    /// Membership whose whole is not tagged as a collective.
    MembershipWholeNotCollective { tuple: Tuple },
}

impl fmt::Display for ModelIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelIssue::LevelMissing { tuple, unlevelled } => write!(
                f,
                "{}({},{},{}): entity `{}` has no granularity level but its co-relatum does",
                tuple.kind, tuple.first, tuple.second, tuple.time, unlevelled
            ),
            ModelIssue::PartNotFiner { tuple } => write!(
                f,
                "{}({},{},{}): part must reside at a finer level than its whole",
                tuple.kind, tuple.first, tuple.second, tuple.time
            ),
            ModelIssue::BindingLevelMismatch { tuple } => write!(
                f,
                "binding({},{},{}): relata must reside at the same level",
                tuple.first, tuple.second, tuple.time
            ),
            ModelIssue::InvolvementNotProcess { tuple, relatum } => write!(
                f,
                "involvement({},{},{}): relatum `{}` is not tagged process-like",
                tuple.first, tuple.second, tuple.time, relatum
            ),
            ModelIssue::MembershipWholeNotCollective { tuple } => write!(
                f,
                "membership({},{},{}): whole `{}` is not tagged as a collective",
                tuple.first, tuple.second, tuple.time, tuple.second
            ),
        }
    }
}

fn is_process_tag(kind: &str) -> bool {
    kind == "process"
}

fn is_collective_tag(kind: &str) -> bool {
    matches!(kind, "collective" | "module-collection" | "library")
}

/// An immutable finite model: entities, typed time-indexed tuples, and the
/// number of discrete time points. All axiom evaluation is read-only, so a
/// model can be shared freely across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteModel {
    entities: BTreeMap<EntityId, Entity>,
    tuples: BTreeSet<Tuple>,
    horizon: u32,
    binding_name: String,
    issues: Vec<ModelIssue>,
}

impl FiniteModel {
    /// Validates and builds a model. Hard invariant violations yield a
    /// [`ModelError`]; granularity/tag discipline violations are collected
    /// into [`issues`](Self::issues) so they are reported, not rejected.
    pub fn new(
        entities: Vec<Entity>,
        tuples: Vec<Tuple>,
        horizon: u32,
        binding_name: impl Into<String>,
    ) -> Result<Self, ModelError> {
        if horizon == 0 {
            return Err(ModelError::HorizonZero);
        }
        let mut map = BTreeMap::new();
        for e in entities {
            if map.insert(e.id.clone(), e.clone()).is_some() {
                return Err(ModelError::DuplicateEntity(e.id));
            }
        }
        let mut set = BTreeSet::new();
        for t in tuples {
            for end in [&t.first, &t.second] {
                if !map.contains_key(end) {
                    return Err(ModelError::UnknownEntity {
                        kind: t.kind,
                        first: t.first.clone(),
                        second: t.second.clone(),
                        time: t.time,
                        unknown: end.clone(),
                    });
                }
            }
            if t.time >= horizon {
                return Err(ModelError::TimeOutOfRange {
                    kind: t.kind,
                    first: t.first,
                    second: t.second,
                    time: t.time,
                    horizon,
                });
            }
            if t.kind.is_proper_parthood_family() && t.first == t.second {
                return Err(ModelError::ReflexiveProperPart {
                    kind: t.kind,
                    id: t.first,
                    time: t.time,
                });
            }
            set.insert(t);
        }

        let mut model = Self {
            entities: map,
            tuples: set,
            horizon,
            binding_name: binding_name.into(),
            issues: Vec::new(),
        };
        model.issues = model.collect_issues();
        Ok(model)
    }

    fn collect_issues(&self) -> Vec<ModelIssue> {
        let mut issues = Vec::new();
        for t in &self.tuples {
            let first = &self.entities[&t.first];
            let second = &self.entities[&t.second];

            match (first.level, second.level) {
                (Some(_), None) => issues.push(ModelIssue::LevelMissing {
                    tuple: t.clone(),
                    unlevelled: t.second.clone(),
                }),
                (None, Some(_)) => issues.push(ModelIssue::LevelMissing {
                    tuple: t.clone(),
                    unlevelled: t.first.clone(),
                }),
                (Some(fl), Some(sl)) => {
                    // smaller index = coarser stratum
                    if t.kind.is_parthood_family() && fl <= sl {
                        issues.push(ModelIssue::PartNotFiner { tuple: t.clone() });
                    }
                    if t.kind.is_binding() && fl != sl {
                        issues.push(ModelIssue::BindingLevelMismatch { tuple: t.clone() });
                    }
                }
                (None, None) => {}
            }

            if t.kind == RelationKind::Involvement {
                for (ent, id) in [(first, &t.first), (second, &t.second)] {
                    if !is_process_tag(&ent.kind) {
                        issues.push(ModelIssue::InvolvementNotProcess {
                            tuple: t.clone(),
                            relatum: id.clone(),
                        });
                    }
                }
            }
            if t.kind == RelationKind::Membership && !is_collective_tag(&second.kind) {
                issues.push(ModelIssue::MembershipWholeNotCollective { tuple: t.clone() });
            }
        }
        issues
    }

    pub fn entities(&self) -> impl Iterator<Item = &Entity> {
        self.entities.values()
    }

    pub fn entity(&self, id: &EntityId) -> Option<&Entity> {
        self.entities.get(id)
    }

    pub fn contains_entity(&self, id: &EntityId) -> bool {
        self.entities.contains_key(id)
    }

    pub fn tuples(&self) -> impl Iterator<Item = &Tuple> {
        self.tuples.iter()
    }

    pub fn has_tuple(&self, kind: RelationKind, first: &EntityId, second: &EntityId, time: TimePoint) -> bool {
        self.tuples.contains(&Tuple {
            kind,
            first: first.clone(),
            second: second.clone(),
            time,
        })
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn binding_name(&self) -> &str {
        &self.binding_name
    }

    /// Discipline violations recorded at construction time.
    pub fn issues(&self) -> &[ModelIssue] {
        &self.issues
    }

    /// All tuples whose kind is subsumed by `kind`.
    pub fn tuples_under(&self, kind: RelationKind) -> impl Iterator<Item = &Tuple> {
        self.tuples.iter().filter(move |t| kind.subsumes(t.kind))
    }

    /// Returns a copy with one tuple removed; useful for counterexample
    /// injection in tests and experiments. The removed tuple need not exist.
    pub fn without_tuple(&self, tuple: &Tuple) -> FiniteModel {
        let mut m = self.clone();
        m.tuples.remove(tuple);
        m
    }

    /// Returns a copy with extra tuples added (same validation as `new`).
    pub fn with_tuples(&self, extra: Vec<Tuple>) -> Result<FiniteModel, ModelError> {
        let mut tuples: Vec<Tuple> = self.tuples.iter().cloned().collect();
        tuples.extend(extra);
        FiniteModel::new(
            self.entities.values().cloned().collect(),
            tuples,
            self.horizon,
            self.binding_name.clone(),
        )
    }
}
