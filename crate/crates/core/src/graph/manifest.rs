//! The `edges/v1` manifest: an explicit edge list for couplings no grammar
//! can see (data reads, link records for compiled artifacts, declared
//! function calls), plus optional exact-version pins.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{normalize_path, Mechanism, Site};

pub const MANIFEST_SCHEMA: &str = "edges/v1";

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("manifest schema error at line {line}: {message}")]
    Schema { line: usize, message: String },
    #[error("unsupported manifest schema `{0}` (expected `edges/v1`)")]
    BadSchema(String),
    #[error("manifest path `{0}` is not a normalized workspace-relative path")]
    BadPath(String),
    #[error("manifest declares a self-{mechanism} edge on `{path}`")]
    SelfEdge { path: String, mechanism: Mechanism },
}

/// One declared coupling record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEdge {
    pub from: String,
    pub to: String,
    pub mechanism: Mechanism,
    /// Manifest key recorded as the edge site; defaults to the record index.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub site: Option<String>,
}

/// Exact-version constraint on one file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestPin {
    pub path: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    #[serde(default)]
    pub edges: Vec<ManifestEdge>,
    #[serde(default)]
    pub pins: Vec<ManifestPin>,
}

impl Manifest {
    /// Parses and validates manifest text. Unknown mechanisms and malformed
    /// records are schema errors carrying the offending line.
    pub fn parse(text: &str) -> Result<Self, ManifestError> {
        let manifest: Manifest =
            serde_json::from_str(text).map_err(|e| ManifestError::Schema {
                line: e.line(),
                message: e.to_string(),
            })?;
        if manifest.schema != MANIFEST_SCHEMA {
            return Err(ManifestError::BadSchema(manifest.schema));
        }
        for edge in &manifest.edges {
            for p in [&edge.from, &edge.to] {
                if normalize_path(p).as_deref() != Some(p.as_str()) {
                    return Err(ManifestError::BadPath(p.clone()));
                }
            }
            if edge.from == edge.to
                && matches!(edge.mechanism, Mechanism::Import | Mechanism::Include)
            {
                return Err(ManifestError::SelfEdge {
                    path: edge.from.clone(),
                    mechanism: edge.mechanism,
                });
            }
        }
        for pin in &manifest.pins {
            if normalize_path(&pin.path).as_deref() != Some(pin.path.as_str()) {
                return Err(ManifestError::BadPath(pin.path.clone()));
            }
        }
        Ok(manifest)
    }

    /// Edge sites for graph assembly: the declared key, or `edge[i]`.
    pub fn edge_sites(&self) -> impl Iterator<Item = (&ManifestEdge, Site)> {
        self.edges.iter().enumerate().map(|(i, e)| {
            let site = Site::Key(e.site.clone().unwrap_or_else(|| format!("edge[{i}]")));
            (e, site)
        })
    }

    pub fn pin_map(&self) -> BTreeMap<String, String> {
        self.pins
            .iter()
            .map(|p| (p.path.clone(), p.version.clone()))
            .collect()
    }
}
