//! Verdict assembly: lift graph + classification into a finite model, run
//! the axioms per connected component, and produce the wholeness report.
//!
//! The scanned tree only ever witnesses the unity half of the wholeness
//! definitions. The non-contingency half says the binding relation is not
//! merely co-parthood *in general*, which no single tree can establish; it
//! is discharged against bundled counterexample models (a module repository
//! for source mode, an object-code library for compiled mode) that are
//! re-verified on every run.

pub mod report;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::classify::{Mode, ParticipationClassification};
use crate::config::AnalysisMode;
use crate::graph::algo::{connected_components, detect_cycles, detect_orphans};
use crate::graph::{DependencyGraph, EdgeFilter};
use crate::model::axioms::{
    check_weak_supplementation, classify_aggregate, eval_noncontingency, eval_unity,
    AggregateClass, AxiomError, NonContingencyResult,
};
use crate::model::{Entity, EntityId, FiniteModel, ModelError, RelationKind, Tuple};

pub use report::{NonContingencySummary, WholenessReport, WholenessVerdict};

/// Granularity level of component wholes in built models.
pub const WHOLE_LEVEL: i32 = 1;
/// Granularity level of file entities in built models.
pub const FILE_LEVEL: i32 = 2;

#[derive(Debug, Error)]
pub enum VerdictError {
    #[error("classification is missing graph node `{0}`")]
    MissingClassification(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Axiom(#[from] AxiomError),
}

/// Options that shape model construction and verdict emission.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerdictOptions {
    pub mode: AnalysisMode,
    /// Treat each orphan file as a candidate standalone program: its
    /// component is assessed and it counts as one infringement unit.
    pub orphans_standalone: bool,
    pub filter: EdgeFilter,
    pub cycle_cap: usize,
}

impl Default for VerdictOptions {
    fn default() -> Self {
        Self {
            mode: AnalysisMode::Source,
            orphans_standalone: false,
            filter: EdgeFilter::default(),
            cycle_cap: crate::graph::algo::DEFAULT_CYCLE_CAP,
        }
    }
}

/// Entity id of the whole built for a component, derived from its smallest
/// contained path so it is stable across edge reorderings. The `//` makes it
/// impossible to collide with a file entity: normalized node paths never
/// contain empty segments.
pub fn whole_id_for_component(component: &BTreeSet<String>) -> EntityId {
    let smallest = component
        .iter()
        .next()
        .map(String::as_str)
        .unwrap_or_default();
    EntityId::new(format!("component://{smallest}"))
}

/// Builds the finite model for a scanned graph.
///
/// One whole entity per connected component (level 1), one entity per file
/// (level 2). Every non-optional file is a genuine functional part of its
/// component's whole at the single time point; binding tuples are the full
/// symmetric closure over those parts within each component, named
/// `SCgraphPath` (source) or `linked` (compiled). Optional files stay in the
/// model as entities without tuples.
pub fn build_model(
    graph: &DependencyGraph,
    classification: &[ParticipationClassification],
    mode: AnalysisMode,
    filter: EdgeFilter,
) -> Result<FiniteModel, VerdictError> {
    let modes: BTreeMap<&str, Mode> = classification
        .iter()
        .map(|c| (c.file.as_str(), c.mode))
        .collect();
    for node in graph.nodes() {
        if !modes.contains_key(node.path.as_str()) {
            return Err(VerdictError::MissingClassification(node.path.clone()));
        }
    }

    let mut entities = Vec::new();
    let mut tuples = Vec::new();

    for component in connected_components(graph, filter) {
        let whole = whole_id_for_component(&component);
        entities.push(
            Entity::new(whole.as_str(), whole.as_str(), "program").with_level(WHOLE_LEVEL),
        );

        let parts: Vec<&String> = component
            .iter()
            .filter(|p| modes[p.as_str()] != Mode::Optional)
            .collect();
        for path in &component {
            entities.push(Entity::new(path.clone(), path.clone(), "file").with_level(FILE_LEVEL));
        }
        for part in &parts {
            tuples.push(Tuple::new(
                RelationKind::GenuineFp,
                part.as_str(),
                whole.as_str(),
                0,
            ));
            for other in &parts {
                if part != other {
                    tuples.push(Tuple::new(
                        RelationKind::Binding,
                        part.as_str(),
                        other.as_str(),
                        0,
                    ));
                }
            }
        }
    }

    Ok(FiniteModel::new(
        entities,
        tuples,
        1,
        mode.binding_name(),
    )?)
}

/// The bundled counterexample model for source mode: a module repository
/// whose members share a whole without any binding among them.
pub fn module_repository_model() -> FiniteModel {
    FiniteModel::new(
        vec![
            Entity::new("module:owl-reader-0.3", "owl-reader 0.3", "module").with_level(FILE_LEVEL),
            Entity::new("module:gui-toolkit-5", "gui-toolkit 5", "module").with_level(FILE_LEVEL),
            Entity::new("module:nl-toolkit-2", "nl-toolkit 2", "module").with_level(FILE_LEVEL),
            Entity::new("repository", "module repository", "module-collection")
                .with_level(WHOLE_LEVEL),
        ],
        vec![
            Tuple::new(RelationKind::Membership, "module:owl-reader-0.3", "repository", 0),
            Tuple::new(RelationKind::Membership, "module:gui-toolkit-5", "repository", 0),
            Tuple::new(RelationKind::Membership, "module:nl-toolkit-2", "repository", 0),
        ],
        1,
        "SCgraphPath",
    )
    .expect("bundled repository model is valid")
}

/// The bundled counterexample model for compiled mode: an object-code
/// library whose members are parts of the archive without being linked.
pub fn object_library_model() -> FiniteModel {
    FiniteModel::new(
        vec![
            Entity::new("obj:alloc.o", "alloc.o", "object").with_level(FILE_LEVEL),
            Entity::new("obj:strops.o", "strops.o", "object").with_level(FILE_LEVEL),
            Entity::new("lib:runtime.a", "runtime.a archive", "library").with_level(WHOLE_LEVEL),
        ],
        vec![
            Tuple::new(RelationKind::Parthood, "obj:alloc.o", "lib:runtime.a", 0),
            Tuple::new(RelationKind::Parthood, "obj:strops.o", "lib:runtime.a", 0),
        ],
        1,
        "linked",
    )
    .expect("bundled library model is valid")
}

/// Bundled model used to discharge non-contingency for a mode.
pub fn counterexample_model(mode: AnalysisMode) -> (&'static str, FiniteModel) {
    match mode {
        AnalysisMode::Source => ("module-repository", module_repository_model()),
        AnalysisMode::Compiled => ("object-code-library", object_library_model()),
    }
}

fn noncontingency_summary(mode: AnalysisMode) -> Result<(NonContingencySummary, NonContingencyResult), VerdictError> {
    let (name, model) = counterexample_model(mode);
    let result = eval_noncontingency(&model, RelationKind::Parthood, RelationKind::Binding)?;
    let summary = NonContingencySummary {
        counterexample_model: name.to_string(),
        sat: result.sat,
        witnesses: result
            .witnesses
            .iter()
            .filter(|w| w.x != w.z)
            .cloned()
            .collect(),
    };
    Ok((summary, result))
}

/// Runs the elimination procedure per component and assembles the report.
///
/// Each connected component's whole is assessed against the unity result of
/// the scanned model and the non-contingency result of the bundled
/// counterexample model. Components consisting purely of orphan files with
/// no parts are reported in the orphan list only, unless
/// `orphans_standalone` designates them candidate programs in their own
/// right.
pub fn issue_verdict(
    model: &FiniteModel,
    graph: &DependencyGraph,
    options: &VerdictOptions,
) -> Result<WholenessReport, VerdictError> {
    let unity = eval_unity(model, RelationKind::GenuineFp, RelationKind::Binding)?;
    let weak_supp = check_weak_supplementation(model);
    let (nc_summary, nc_result) = noncontingency_summary(options.mode)?;

    let components = connected_components(graph, options.filter);
    let orphans = detect_orphans(graph, graph.entries(), options.filter);
    let cycles = detect_cycles(graph, options.cycle_cap);

    let is_part = |path: &str| {
        model
            .tuples_under(RelationKind::GenuineFp)
            .any(|t| t.first.as_str() == path)
    };

    let mut verdicts = Vec::new();
    for component in &components {
        let whole = whole_id_for_component(component);
        let has_parts = component.iter().any(|p| is_part(p));
        let all_orphaned = component.iter().all(|p| orphans.contains(p));
        if all_orphaned && !has_parts && !options.orphans_standalone {
            // excess-baggage reading: reported in the orphan list only
            continue;
        }

        let unity_here = unity.for_whole(&whole);
        let decision = classify_aggregate(model, &whole, &unity_here, &nc_result)?;

        let mut notes = Vec::new();
        for v in weak_supp.iter().filter(|v| v.whole == whole) {
            notes.push(format!(
                "weak supplementation: `{}` is the only proper part at t={} (no disjoint supplement)",
                v.part, v.time
            ));
        }
        for cycle in cycles
            .cycles
            .iter()
            .filter(|c| c.iter().all(|n| component.contains(n)))
        {
            notes.push(format!("dependency cycle: {}", cycle.join(" -> ")));
        }
        let excluded: Vec<&str> = component
            .iter()
            .filter(|p| !is_part(p))
            .map(String::as_str)
            .collect();
        if !excluded.is_empty() && has_parts {
            notes.push(format!(
                "optional files excluded from the part set: {}",
                excluded.join(", ")
            ));
        }

        verdicts.push(WholenessVerdict {
            component_id: whole.to_string(),
            class: decision.class,
            binding_name: model.binding_name().to_string(),
            files: component.iter().cloned().collect(),
            counterexamples: unity_here.counterexamples,
            evidence: decision.evidence,
            notes,
        });
    }

    let whole_count = verdicts
        .iter()
        .filter(|v| v.class == AggregateClass::FunctionalWhole)
        .count();
    // orphan files count as standalone units only under the flag, and never
    // when their component was already counted as a functional whole
    let fw_files: BTreeSet<&str> = verdicts
        .iter()
        .filter(|v| v.class == AggregateClass::FunctionalWhole)
        .flat_map(|v| v.files.iter().map(String::as_str))
        .collect();
    let standalone_orphans = if options.orphans_standalone {
        orphans
            .iter()
            .filter(|o| !fw_files.contains(o.as_str()))
            .count()
    } else {
        0
    };

    Ok(WholenessReport {
        schema: report::REPORT_SCHEMA.to_string(),
        tool_version: crate::TOOL_VERSION.to_string(),
        input_digest: graph.digest().to_string(),
        mode: options.mode,
        binding_name: model.binding_name().to_string(),
        verdicts,
        orphan_files: orphans.into_iter().collect(),
        orphans_standalone: options.orphans_standalone,
        cycles,
        infringement_units: (whole_count + standalone_orphans) as u32,
        noncontingency: nc_summary,
        notes: vec![
            crate::classify::IMMUTABLE_NOTE.to_string(),
            "unity and non-contingency are checked against the same binding relation; whether the two conditions may use different binding relations is left open"
                .to_string(),
        ],
    })
}
