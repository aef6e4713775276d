//! Typed file dependency graphs: nodes are workspace-relative files, edges
//! are concrete coupling mechanisms (imports, includes, data reads, link
//! records), and a designated entry set marks where the program starts.

pub mod algo;
pub mod extract;
pub mod manifest;
pub mod text;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Role a file plays in the tree, inferred from the claiming grammar or the
/// file extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FileRole {
    Source,
    Data,
    Config,
    Object,
    Unknown,
}

/// How one file couples to another.
///
/// The first five mechanisms are tight enough to bind files into one program;
/// `socket` and `pipe` are loose inter-process couplings, representable in a
/// manifest but excluded from connectivity unless explicitly enabled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mechanism {
    #[serde(rename = "import")]
    Import,
    #[serde(rename = "include")]
    Include,
    #[serde(rename = "data-read")]
    DataRead,
    #[serde(rename = "function-call-manifest")]
    FunctionCallManifest,
    #[serde(rename = "link")]
    Link,
    #[serde(rename = "socket")]
    Socket,
    #[serde(rename = "pipe")]
    Pipe,
}

impl Mechanism {
    pub fn is_loose(self) -> bool {
        matches!(self, Mechanism::Socket | Mechanism::Pipe)
    }

    pub fn name(self) -> &'static str {
        match self {
            Mechanism::Import => "import",
            Mechanism::Include => "include",
            Mechanism::DataRead => "data-read",
            Mechanism::FunctionCallManifest => "function-call-manifest",
            Mechanism::Link => "link",
            Mechanism::Socket => "socket",
            Mechanism::Pipe => "pipe",
        }
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where an edge was asserted: a source line or a manifest key.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Site {
    #[serde(rename = "line")]
    Line(u32),
    #[serde(rename = "key")]
    Key(String),
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Site::Line(n) => write!(f, "line {n}"),
            Site::Key(k) => write!(f, "key {k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileNode {
    pub path: String,
    pub role: FileRole,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grammar: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DepEdge {
    pub from: String,
    pub to: String,
    pub mechanism: Mechanism,
    pub site: Site,
}

/// An import or include whose target resolved to nothing inside the tree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Unresolved {
    pub from: String,
    pub target: String,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge endpoint `{0}` is not a node")]
    UnknownEndpoint(String),
    #[error("self-{mechanism} edge on `{path}` rejected")]
    SelfEdge { path: String, mechanism: Mechanism },
    #[error("path `{0}` is not normalized")]
    BadPath(String),
    #[error("duplicate node path `{0}`")]
    DuplicateNode(String),
    #[error("declared entry `{0}` is not in the graph")]
    UnknownEntry(String),
}

/// Returns the workspace-relative normal form, or `None` for absolute paths
/// or paths with `.`/`..` segments.
pub fn normalize_path(path: &str) -> Option<String> {
    let unified = path.replace('\\', "/");
    if unified.starts_with('/') || unified.is_empty() {
        return None;
    }
    let mut parts = Vec::new();
    for seg in unified.split('/') {
        match seg {
            "" | "." | ".." => return None,
            s => parts.push(s),
        }
    }
    Some(parts.join("/"))
}

/// Immutable after construction; all algorithms take `&self`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DependencyGraph {
    nodes: BTreeMap<String, FileNode>,
    edges: Vec<DepEdge>,
    entries: BTreeSet<String>,
    unresolved: Vec<Unresolved>,
    /// Exact-version constraints declared in the manifest, by path.
    pins: BTreeMap<String, String>,
    /// Content hash of the scanned tree and manifest bytes.
    digest: String,
}

impl DependencyGraph {
    /// Builds a graph from parts, enforcing the node/edge invariants:
    /// normalized unique paths, endpoints present, no self imports/includes.
    pub fn new(nodes: Vec<FileNode>, edges: Vec<DepEdge>) -> Result<Self, GraphError> {
        let mut node_map = BTreeMap::new();
        for n in nodes {
            let norm = normalize_path(&n.path).ok_or_else(|| GraphError::BadPath(n.path.clone()))?;
            if norm != n.path {
                return Err(GraphError::BadPath(n.path));
            }
            if node_map.insert(n.path.clone(), n.clone()).is_some() {
                return Err(GraphError::DuplicateNode(n.path));
            }
        }
        let mut edge_set: BTreeSet<DepEdge> = BTreeSet::new();
        for e in edges {
            for end in [&e.from, &e.to] {
                if !node_map.contains_key(end) {
                    return Err(GraphError::UnknownEndpoint(end.clone()));
                }
            }
            if e.from == e.to
                && matches!(e.mechanism, Mechanism::Import | Mechanism::Include)
            {
                return Err(GraphError::SelfEdge {
                    path: e.from,
                    mechanism: e.mechanism,
                });
            }
            edge_set.insert(e);
        }
        Ok(Self {
            nodes: node_map,
            edges: edge_set.into_iter().collect(),
            entries: BTreeSet::new(),
            unresolved: Vec::new(),
            pins: BTreeMap::new(),
            digest: String::new(),
        })
    }

    pub fn nodes(&self) -> impl Iterator<Item = &FileNode> {
        self.nodes.values()
    }

    pub fn node(&self, path: &str) -> Option<&FileNode> {
        self.nodes.get(path)
    }

    pub fn contains(&self, path: &str) -> bool {
        self.nodes.contains_key(path)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edges(&self) -> &[DepEdge] {
        &self.edges
    }

    pub fn entries(&self) -> &BTreeSet<String> {
        &self.entries
    }

    pub fn unresolved(&self) -> &[Unresolved] {
        &self.unresolved
    }

    pub fn pins(&self) -> &BTreeMap<String, String> {
        &self.pins
    }

    pub fn digest(&self) -> &str {
        &self.digest
    }

    pub fn set_entries(&mut self, entries: BTreeSet<String>) -> Result<(), GraphError> {
        for e in &entries {
            if !self.nodes.contains_key(e) {
                return Err(GraphError::UnknownEntry(e.clone()));
            }
        }
        self.entries = entries;
        Ok(())
    }

    pub(crate) fn set_unresolved(&mut self, mut unresolved: Vec<Unresolved>) {
        unresolved.sort();
        unresolved.dedup();
        self.unresolved = unresolved;
    }

    pub(crate) fn set_pins(&mut self, pins: BTreeMap<String, String>) {
        self.pins = pins;
    }

    pub(crate) fn set_digest(&mut self, digest: String) {
        self.digest = digest;
    }
}

/// Selects which edges participate in connectivity, reachability, and
/// binding-relation construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EdgeFilter {
    /// Count socket/pipe couplings as connectivity too.
    pub include_loose: bool,
}

impl EdgeFilter {
    pub fn admits(&self, mechanism: Mechanism) -> bool {
        self.include_loose || !mechanism.is_loose()
    }
}
