//! The `graph/v1` structured dump: a deterministic serialization of the
//! dependency graph consumed by the verdict stage and by external tooling.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{DepEdge, DependencyGraph, FileNode, GraphError, Unresolved};

pub const GRAPH_SCHEMA: &str = "graph/v1";

#[derive(Debug, Error)]
pub enum GraphTextError {
    #[error("graph text is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema `{0}` (expected `graph/v1`)")]
    BadSchema(String),
    #[error(transparent)]
    Invalid(#[from] GraphError),
}

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    schema: String,
    #[serde(default)]
    digest: String,
    nodes: Vec<FileNode>,
    edges: Vec<DepEdge>,
    #[serde(default)]
    entries: Vec<String>,
    #[serde(default)]
    unresolved: Vec<Unresolved>,
    #[serde(default)]
    pins: BTreeMap<String, String>,
}

/// Serializes the graph in canonical (sorted) form.
pub fn print_graph(graph: &DependencyGraph) -> String {
    let doc = GraphDoc {
        schema: GRAPH_SCHEMA.to_string(),
        digest: graph.digest().to_string(),
        nodes: graph.nodes().cloned().collect(),
        edges: graph.edges().to_vec(),
        entries: graph.entries().iter().cloned().collect(),
        unresolved: graph.unresolved().to_vec(),
        pins: graph.pins().clone(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("graph serialization cannot fail");
    out.push('\n');
    out
}

/// Parses a `graph/v1` document back into a validated graph.
pub fn parse_graph(text: &str) -> Result<DependencyGraph, GraphTextError> {
    let doc: GraphDoc = serde_json::from_str(text)?;
    if doc.schema != GRAPH_SCHEMA {
        return Err(GraphTextError::BadSchema(doc.schema));
    }
    let mut graph = DependencyGraph::new(doc.nodes, doc.edges)?;
    graph.set_entries(doc.entries.into_iter().collect())?;
    graph.set_unresolved(doc.unresolved);
    graph.set_pins(doc.pins);
    graph.set_digest(doc.digest);
    Ok(graph)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{FileRole, Mechanism, Site};

    #[test]
    fn graph_round_trip_is_identity() {
        let mut g = DependencyGraph::new(
            vec![
                FileNode {
                    path: "main.py".into(),
                    role: FileRole::Source,
                    grammar: Some("python".into()),
                },
                FileNode {
                    path: "util.py".into(),
                    role: FileRole::Source,
                    grammar: Some("python".into()),
                },
            ],
            vec![DepEdge {
                from: "main.py".into(),
                to: "util.py".into(),
                mechanism: Mechanism::Import,
                site: Site::Line(3),
            }],
        )
        .unwrap();
        g.set_entries(["main.py".to_string()].into_iter().collect())
            .unwrap();
        g.set_digest("sha256:abc".into());

        let printed = print_graph(&g);
        let parsed = parse_graph(&printed).unwrap();
        assert_eq!(parsed, g);
        assert_eq!(print_graph(&parsed), printed);
    }

    #[test]
    fn rejects_unknown_schema() {
        assert!(matches!(
            parse_graph(r#"{"schema":"graph/v9","nodes":[],"edges":[]}"#),
            Err(GraphTextError::BadSchema(_))
        ));
    }
}
