//! The wholeness report: `report/v1` structured schema and the stable human
//! rendering. Structured output is byte-identical across runs on identical
//! inputs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::AnalysisMode;
use crate::graph::algo::CycleSet;
use crate::model::axioms::{AggregateClass, NonContingencyWitness, UnityCounterexample};

pub const REPORT_SCHEMA: &str = "report/v1";

#[derive(Debug, Error)]
pub enum ReportTextError {
    #[error("report text is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema `{0}` (expected `report/v1`)")]
    BadSchema(String),
}

/// Outcome of the non-contingency check on the bundled counterexample model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonContingencySummary {
    /// Which bundled model discharged the check.
    pub counterexample_model: String,
    pub sat: bool,
    pub witnesses: Vec<NonContingencyWitness>,
}

/// Per-component verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WholenessVerdict {
    pub component_id: String,
    pub class: AggregateClass,
    pub binding_name: String,
    pub files: Vec<String>,
    pub counterexamples: Vec<UnityCounterexample>,
    pub evidence: Vec<String>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WholenessReport {
    pub schema: String,
    pub tool_version: String,
    pub input_digest: String,
    pub mode: AnalysisMode,
    pub binding_name: String,
    pub verdicts: Vec<WholenessVerdict>,
    pub orphan_files: Vec<String>,
    pub orphans_standalone: bool,
    pub cycles: CycleSet,
    pub infringement_units: u32,
    pub noncontingency: NonContingencySummary,
    pub notes: Vec<String>,
}

impl WholenessReport {
    /// True iff at least one verdict exists and every verdict is a
    /// functional whole; governs the process exit code.
    pub fn all_wholes(&self) -> bool {
        !self.verdicts.is_empty()
            && self
                .verdicts
                .iter()
                .all(|v| v.class == AggregateClass::FunctionalWhole)
    }
}

/// Serializes the report in the `report/v1` schema.
pub fn print_report_structured(report: &WholenessReport) -> String {
    let mut out =
        serde_json::to_string_pretty(report).expect("report serialization cannot fail");
    out.push('\n');
    out
}

/// Parses a `report/v1` document.
pub fn parse_report(text: &str) -> Result<WholenessReport, ReportTextError> {
    let report: WholenessReport = serde_json::from_str(text)?;
    if report.schema != REPORT_SCHEMA {
        return Err(ReportTextError::BadSchema(report.schema));
    }
    Ok(report)
}

/// Renders the stable, diffable text layout.
pub fn print_report_human(report: &WholenessReport) -> String {
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };

    line("wholeness report".to_string());
    line(format!("  tool version : {}", report.tool_version));
    line(format!("  input digest : {}", report.input_digest));
    line(format!(
        "  mode         : {} (binding: {})",
        match report.mode {
            AnalysisMode::Source => "source",
            AnalysisMode::Compiled => "compiled",
        },
        report.binding_name
    ));
    line(String::new());

    if report.verdicts.is_empty() {
        line("verdicts: none (no component qualified for assessment)".to_string());
    } else {
        line(format!("verdicts ({}):", report.verdicts.len()));
        for v in &report.verdicts {
            line(format!(
                "  [{}] {} (binding: {})",
                v.component_id, v.class, v.binding_name
            ));
            line(format!("    files ({}): {}", v.files.len(), v.files.join(", ")));
            for e in &v.evidence {
                line(format!("    evidence: {e}"));
            }
            for c in &v.counterexamples {
                line(format!(
                    "    counterexample: x={} whole={} z={} t={} ({})",
                    c.x, c.whole, c.z, c.time, c.direction
                ));
            }
            for n in &v.notes {
                line(format!("    note: {n}"));
            }
        }
    }
    line(String::new());

    if report.orphan_files.is_empty() {
        line("orphan files: none".to_string());
    } else {
        line(format!(
            "orphan files ({}, {}): {}",
            report.orphan_files.len(),
            if report.orphans_standalone {
                "designated standalone"
            } else {
                "excess baggage or candidate separate programs"
            },
            report.orphan_files.join(", ")
        ));
    }

    if report.cycles.cycles.is_empty() {
        line("dependency cycles: none".to_string());
    } else {
        line(format!(
            "dependency cycles ({}{}):",
            report.cycles.cycles.len(),
            if report.cycles.truncated {
                ", truncated"
            } else {
                ""
            }
        ));
        for c in &report.cycles.cycles {
            line(format!("  {}", c.join(" -> ")));
        }
    }

    line(format!(
        "non-contingency: {} on bundled {} model{}",
        if report.noncontingency.sat {
            "witnessed"
        } else {
            "NOT witnessed"
        },
        report.noncontingency.counterexample_model,
        report
            .noncontingency
            .witnesses
            .first()
            .map(|w| format!(" (e.g. {} and {} share a whole unbound at t={})", w.x, w.z, w.time))
            .unwrap_or_default()
    ));
    line(String::new());
    line(format!("infringement units: {}", report.infringement_units));
    for n in &report.notes {
        line(format!("note: {n}"));
    }
    out
}
