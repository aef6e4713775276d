//! Participation-mode classification: how strongly each file participates in
//! the whole.
//!
//! The graph-only pass is structural: orphans and files the entry points
//! never reach are `optional`, everything else is `mandatory`. A probe pass
//! sharpens this with removal and replacement experiments against a
//! user-supplied command, and manifest version pins mark files `essential`.
//! `immutable` is deliberately never inferred; reports carry a fixed
//! not-applicable note instead.
//!
//! The mode decision is a function of the evidence alone:
//!
//! | evidence contains                  | mode      |
//! |------------------------------------|-----------|
//! | pinned-version                     | essential |
//! | replacement-probe-failed           | essential |
//! | removal-probe-passed               | optional  |
//! | removal-probe-failed               | mandatory |
//! | probe-timeout                      | unknown   |
//! | orphan or unreachable (no probe)   | optional  |
//! | otherwise                          | mandatory |
//!
//! Rows are tried top to bottom; [`mode_from_evidence`] replays the table.

pub mod probe;
pub mod text;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::algo::{detect_orphans, reachable_from_entries};
use crate::graph::{DependencyGraph, EdgeFilter};
use probe::{run_probe, stage_without, stage_with_stub, ProbeError, ProbeOutcome, ProbeSpec};

/// Fixed report wording for the participation mode the tool never infers.
pub const IMMUTABLE_NOTE: &str =
    "immutable participation: not applicable (collapses to mandatory or essential under a full specification)";

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Probe(#[from] ProbeError),
    #[error("replacement stub for `{0}` requires a probe command")]
    StubWithoutProbe(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Optional,
    Mandatory,
    Essential,
    Unknown,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Optional => "optional",
            Mode::Mandatory => "mandatory",
            Mode::Essential => "essential",
            Mode::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    GraphOnly,
    Probe,
}

/// Individual observations backing a classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Evidence {
    Orphan,
    Unreachable,
    RemovalProbePassed,
    RemovalProbeFailed,
    ReplacementProbePassed,
    ReplacementProbeFailed,
    PinnedVersion,
    ProbeTimeout,
}

impl Evidence {
    /// Kebab-case tag, identical to the `classify/v1` spelling.
    pub fn tag(self) -> &'static str {
        match self {
            Evidence::Orphan => "orphan",
            Evidence::Unreachable => "unreachable",
            Evidence::RemovalProbePassed => "removal-probe-passed",
            Evidence::RemovalProbeFailed => "removal-probe-failed",
            Evidence::ReplacementProbePassed => "replacement-probe-passed",
            Evidence::ReplacementProbeFailed => "replacement-probe-failed",
            Evidence::PinnedVersion => "pinned-version",
            Evidence::ProbeTimeout => "probe-timeout",
        }
    }

    pub fn is_probe_observation(self) -> bool {
        matches!(
            self,
            Evidence::RemovalProbePassed
                | Evidence::RemovalProbeFailed
                | Evidence::ReplacementProbePassed
                | Evidence::ReplacementProbeFailed
                | Evidence::ProbeTimeout
        )
    }
}

/// Replays the published decision table over an evidence set.
pub fn mode_from_evidence(evidence: &[Evidence]) -> Mode {
    if evidence.contains(&Evidence::PinnedVersion)
        || evidence.contains(&Evidence::ReplacementProbeFailed)
    {
        Mode::Essential
    } else if evidence.contains(&Evidence::RemovalProbePassed) {
        Mode::Optional
    } else if evidence.contains(&Evidence::RemovalProbeFailed) {
        Mode::Mandatory
    } else if evidence.contains(&Evidence::ProbeTimeout) {
        Mode::Unknown
    } else if evidence.contains(&Evidence::Orphan) || evidence.contains(&Evidence::Unreachable) {
        Mode::Optional
    } else {
        Mode::Mandatory
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParticipationClassification {
    pub file: String,
    pub mode: Mode,
    pub basis: Basis,
    pub evidence: Vec<Evidence>,
}

impl ParticipationClassification {
    fn new(file: String, evidence: Vec<Evidence>) -> Self {
        let basis = if evidence.iter().any(|e| e.is_probe_observation()) {
            Basis::Probe
        } else {
            Basis::GraphOnly
        };
        Self {
            file,
            mode: mode_from_evidence(&evidence),
            basis,
            evidence,
        }
    }

    pub fn is_optional(&self) -> bool {
        self.mode == Mode::Optional
    }
}

/// Classifies every node of the graph.
///
/// Graph-only pass first; when `probe` is given, every file is additionally
/// subjected to a removal experiment (and, with a stub in `replacements`, a
/// replacement experiment) in an isolated staging copy of `root`. Files with
/// an exact-version pin in the manifest are `essential` regardless.
pub fn classify_participation(
    graph: &DependencyGraph,
    root: Option<&Path>,
    probe: Option<&ProbeSpec>,
    replacements: &BTreeMap<String, std::path::PathBuf>,
    filter: EdgeFilter,
) -> Result<Vec<ParticipationClassification>, ClassifyError> {
    if probe.is_none() && !replacements.is_empty() {
        let first = replacements.keys().next().unwrap().clone();
        return Err(ClassifyError::StubWithoutProbe(first));
    }

    let entries = graph.entries();
    let orphans = detect_orphans(graph, entries, filter);
    let reachable = reachable_from_entries(graph, entries, filter);

    let mut out = Vec::new();
    for node in graph.nodes() {
        let path = &node.path;
        let mut evidence = Vec::new();

        if orphans.contains(path) {
            evidence.push(Evidence::Orphan);
        } else if !reachable.contains(path) {
            evidence.push(Evidence::Unreachable);
        }
        if graph.pins().contains_key(path) {
            evidence.push(Evidence::PinnedVersion);
        }

        if let (Some(spec), Some(root)) = (probe, root) {
            if !graph.pins().contains_key(path) {
                run_file_probes(root, path, spec, replacements.get(path), &mut evidence)?;
            }
        }

        out.push(ParticipationClassification::new(path.clone(), evidence));
    }
    // nodes iterate in path order already; keep the contract explicit
    out.sort_by(|a, b| a.file.cmp(&b.file));
    Ok(out)
}

fn run_file_probes(
    root: &Path,
    path: &str,
    spec: &ProbeSpec,
    stub: Option<&std::path::PathBuf>,
    evidence: &mut Vec<Evidence>,
) -> Result<(), ClassifyError> {
    let staged = stage_without(root, path, spec)?;
    match run_probe(spec, staged.path())? .outcome {
        ProbeOutcome::Pass => {
            evidence.push(Evidence::RemovalProbePassed);
            return Ok(());
        }
        ProbeOutcome::Timeout => {
            evidence.push(Evidence::ProbeTimeout);
            return Ok(());
        }
        ProbeOutcome::Fail => evidence.push(Evidence::RemovalProbeFailed),
    }

    if let Some(stub) = stub {
        let staged = stage_with_stub(root, path, stub, spec)?;
        match run_probe(spec, staged.path())?.outcome {
            ProbeOutcome::Pass => evidence.push(Evidence::ReplacementProbePassed),
            ProbeOutcome::Fail => evidence.push(Evidence::ReplacementProbeFailed),
            ProbeOutcome::Timeout => evidence.push(Evidence::ProbeTimeout),
        }
    }
    Ok(())
}
