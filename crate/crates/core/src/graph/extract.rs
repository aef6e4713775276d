//! Dependency extraction: walk a source tree, let each grammar claim and
//! parse its files, merge in the manifest, and assemble the graph.
//!
//! Extraction is deterministic: files are visited in sorted path order and
//! the assembled graph is canonically ordered, so identical tree bytes
//! always yield an identical serialization.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use regex::Regex;
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::manifest::{Manifest, ManifestError};
use super::{normalize_path, DepEdge, DependencyGraph, FileNode, FileRole, GraphError, Mechanism, Site, Unresolved};

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("cannot read scan root `{root}`: {source}")]
    Root {
        root: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot read manifest `{path}`: {source}")]
    ManifestIo {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("no grammars enabled and no manifest given")]
    NothingToDo,
}

/// Pluggable extraction grammars.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Grammar {
    /// `import X` / `from X import ...` statements in `.py` files.
    Python,
    /// `#include "x"` / `#include <x>` directives in `.c/.h/.cpp/.hpp` files.
    C,
}

impl Grammar {
    pub const ALL: &'static [Grammar] = &[Grammar::Python, Grammar::C];

    pub fn name(self) -> &'static str {
        match self {
            Grammar::Python => "python",
            Grammar::C => "c",
        }
    }

    pub fn parse_name(name: &str) -> Option<Grammar> {
        match name {
            "python" => Some(Grammar::Python),
            "c" => Some(Grammar::C),
            _ => None,
        }
    }

    fn claims(self, path: &str) -> bool {
        let ext = path.rsplit('.').next().unwrap_or("");
        match self {
            Grammar::Python => ext == "py",
            Grammar::C => matches!(ext, "c" | "h" | "cpp" | "hpp"),
        }
    }
}

/// A non-fatal extraction diagnostic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractWarning {
    pub path: String,
    pub message: String,
}

/// The assembled graph plus per-file warnings.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub graph: DependencyGraph,
    pub warnings: Vec<ExtractWarning>,
}

fn role_for_path(path: &str) -> FileRole {
    let ext = path.rsplit('.').next().unwrap_or("").to_ascii_lowercase();
    match ext.as_str() {
        "py" | "c" | "h" | "cpp" | "hpp" => FileRole::Source,
        "o" | "so" | "a" | "dll" | "dylib" | "exe" | "jar" | "bin" | "pyc" => FileRole::Object,
        "ini" | "cfg" | "conf" | "toml" | "yaml" | "yml" | "xml" | "json" | "properties" => {
            FileRole::Config
        }
        "txt" | "csv" | "tsv" | "dat" | "dict" | "md" => FileRole::Data,
        _ => FileRole::Unknown,
    }
}

/// Walks `root` and returns all regular files as sorted workspace-relative
/// paths. Hidden files and directories (leading dot) are skipped, as are the
/// scan's own input files when they live inside the tree.
fn list_files(root: &Path, exclude: &BTreeSet<PathBuf>) -> Result<Vec<String>, ExtractError> {
    if !root.is_dir() {
        return Err(ExtractError::Root {
            root: root.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "not a directory"),
        });
    }
    let mut files = Vec::new();
    let walker = walkdir::WalkDir::new(root)
        .sort_by_file_name()
        .into_iter()
        .filter_entry(|e| {
            e.depth() == 0 || !e.file_name().to_string_lossy().starts_with('.')
        });
    for entry in walker {
        let entry = entry.map_err(|e| ExtractError::Root {
            root: root.to_path_buf(),
            source: e.into(),
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        // the tool's own configuration is never part of the artifact
        if entry.file_name().to_string_lossy() == "mereoscan.toml" {
            continue;
        }
        if exclude.contains(entry.path())
            || entry
                .path()
                .canonicalize()
                .is_ok_and(|c| exclude.contains(&c))
        {
            continue;
        }
        let rel = entry
            .path()
            .strip_prefix(root)
            .expect("walkdir yields paths under root")
            .to_string_lossy()
            .replace('\\', "/");
        if let Some(norm) = normalize_path(&rel) {
            files.push(norm);
        }
    }
    files.sort();
    Ok(files)
}

/// Content hash over the scanned tree (sorted paths and bytes) plus the
/// manifest bytes, if any.
fn tree_digest(root: &Path, files: &[String], manifest_text: Option<&str>) -> String {
    let mut hasher = Sha256::new();
    for rel in files {
        hasher.update(rel.as_bytes());
        hasher.update([0u8]);
        let bytes = fs::read(root.join(rel)).unwrap_or_default();
        hasher.update((bytes.len() as u64).to_be_bytes());
        hasher.update(&bytes);
    }
    if let Some(text) = manifest_text {
        hasher.update(b"\0manifest\0");
        hasher.update(text.as_bytes());
    }
    format!("sha256:{:x}", hasher.finalize())
}

/// One parsed import/include occurrence.
struct RawRef {
    line: u32,
    target: RefTarget,
}

enum RefTarget {
    /// Dotted Python module spec, with the number of leading relative dots.
    PyModule { dots: usize, module: String },
    /// Quoted include: resolved against the including file's directory, then
    /// the tree root.
    IncludeQuoted(String),
    /// Angle include: external by definition.
    IncludeAngle(String),
}

fn parse_python(text: &str) -> Vec<RawRef> {
    let mut refs = Vec::new();
    let mut in_triple: Option<&str> = None;
    for (idx, line) in text.lines().enumerate() {
        let lineno = (idx + 1) as u32;
        let trimmed = line.trim_start();

        // crude docstring tracking: enough to skip import-looking prose
        if let Some(delim) = in_triple {
            if trimmed.contains(delim) {
                in_triple = None;
            }
            continue;
        }
        for delim in ["\"\"\"", "'''"] {
            if trimmed.starts_with(delim) && !trimmed[delim.len()..].contains(delim) {
                in_triple = Some(delim);
            }
        }
        if in_triple.is_some() || trimmed.starts_with('#') {
            continue;
        }

        if let Some(rest) = trimmed.strip_prefix("import ") {
            // `import a.b as c, d` declares one target per module spec
            let rest = rest.split('#').next().unwrap_or("");
            for spec in rest.split(',') {
                let module = spec.split_whitespace().next().unwrap_or("");
                if !module.is_empty() {
                    refs.push(RawRef {
                        line: lineno,
                        target: RefTarget::PyModule {
                            dots: 0,
                            module: module.to_string(),
                        },
                    });
                }
            }
        } else if let Some(rest) = trimmed.strip_prefix("from ") {
            // `from X import a, b` is a single dependency on X
            if let Some((module_part, _)) = rest.split_once(" import ") {
                let raw = module_part.trim();
                let dots = raw.chars().take_while(|c| *c == '.').count();
                let module = raw[dots..].trim().to_string();
                refs.push(RawRef {
                    line: lineno,
                    target: RefTarget::PyModule { dots, module },
                });
            }
        }
    }
    refs
}

fn parse_c(text: &str, include_re: &Regex) -> Vec<RawRef> {
    let mut refs = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if let Some(caps) = include_re.captures(line) {
            let open = caps.get(1).unwrap().as_str();
            let target = caps.get(2).unwrap().as_str().to_string();
            refs.push(RawRef {
                line: (idx + 1) as u32,
                target: if open == "\"" {
                    RefTarget::IncludeQuoted(target)
                } else {
                    RefTarget::IncludeAngle(target)
                },
            });
        }
    }
    refs
}

/// Resolves a dotted module spec against the tree layout: `a.b` matches
/// `a/b.py` or the package `a/b/__init__.py`. Relative dots walk up from the
/// importing file's directory; absolute specs try the tree root first and
/// then the importer's own directory (script-style resolution).
fn resolve_py_module(
    files: &BTreeSet<String>,
    importer: &str,
    dots: usize,
    module: &str,
) -> Option<String> {
    let mut importer_dir: Vec<&str> = importer.split('/').collect();
    importer_dir.pop(); // file name

    let bases: Vec<Vec<&str>> = if dots > 0 {
        let mut base = importer_dir;
        for _ in 1..dots {
            base.pop()?;
        }
        vec![base]
    } else {
        vec![Vec::new(), importer_dir]
    };

    for base in bases {
        let mut segments = base;
        if !module.is_empty() {
            segments.extend(module.split('.'));
        }
        if segments.is_empty() {
            continue;
        }
        let stem = segments.join("/");
        for candidate in [format!("{stem}.py"), format!("{stem}/__init__.py")] {
            if files.contains(&candidate) {
                return Some(candidate);
            }
        }
    }
    None
}

fn resolve_include(files: &BTreeSet<String>, includer: &str, spec: &str) -> Option<String> {
    let dir = match includer.rsplit_once('/') {
        Some((d, _)) => format!("{d}/{spec}"),
        None => spec.to_string(),
    };
    for candidate in [dir, spec.to_string()] {
        if let Some(norm) = normalize_path(&candidate) {
            if files.contains(&norm) {
                return Some(norm);
            }
        }
    }
    None
}

/// Scans `root` with the given grammars, merges the manifest when given, and
/// assembles the final graph. Per-file parse failures become warnings with a
/// zero-out-edge node; they never abort the scan.
pub fn extract_dependencies(
    root: &Path,
    grammars: &[Grammar],
    manifest_path: Option<&Path>,
) -> Result<Extraction, ExtractError> {
    if grammars.is_empty() && manifest_path.is_none() {
        return Err(ExtractError::NothingToDo);
    }

    let manifest_text = match manifest_path {
        Some(p) => Some(fs::read_to_string(p).map_err(|source| ExtractError::ManifestIo {
            path: p.to_path_buf(),
            source,
        })?),
        None => None,
    };
    let manifest = manifest_text
        .as_deref()
        .map(Manifest::parse)
        .transpose()?;

    // input files never count as artifact nodes when they live in the tree
    let mut exclude = BTreeSet::new();
    if let Some(p) = manifest_path {
        if let Ok(abs) = p.canonicalize() {
            exclude.insert(abs);
        }
        exclude.insert(p.to_path_buf());
    }
    let files = list_files(root, &exclude)?;
    let file_set: BTreeSet<String> = files.iter().cloned().collect();
    let digest = tree_digest(root, &files, manifest_text.as_deref());

    let include_re = Regex::new(r#"^\s*#\s*include\s*(["<])\s*([^">]+?)\s*[">]"#)
        .expect("static regex");

    let mut nodes: BTreeMap<String, FileNode> = BTreeMap::new();
    let mut edges: Vec<DepEdge> = Vec::new();
    let mut unresolved: Vec<Unresolved> = Vec::new();
    let mut warnings: Vec<ExtractWarning> = Vec::new();

    let mut sorted_grammars = grammars.to_vec();
    sorted_grammars.sort();
    sorted_grammars.dedup();

    for rel in &files {
        let claimed = sorted_grammars.iter().copied().find(|g| g.claims(rel));
        nodes.insert(
            rel.clone(),
            FileNode {
                path: rel.clone(),
                role: role_for_path(rel),
                grammar: claimed.map(|g| g.name().to_string()),
            },
        );
        let Some(grammar) = claimed else {
            continue;
        };

        let mut text = String::new();
        let read = fs::File::open(root.join(rel))
            .and_then(|mut f| f.read_to_string(&mut text));
        if let Err(e) = read {
            warnings.push(ExtractWarning {
                path: rel.clone(),
                message: format!("unparseable source file ({e}); recorded with no outgoing edges"),
            });
            continue;
        }

        let refs = match grammar {
            Grammar::Python => parse_python(&text),
            Grammar::C => parse_c(&text, &include_re),
        };
        for r in refs {
            let (resolved, spec, mechanism) = match &r.target {
                RefTarget::PyModule { dots, module } => (
                    resolve_py_module(&file_set, rel, *dots, module),
                    format!("{}{}", ".".repeat(*dots), module),
                    Mechanism::Import,
                ),
                RefTarget::IncludeQuoted(spec) => (
                    resolve_include(&file_set, rel, spec),
                    spec.clone(),
                    Mechanism::Include,
                ),
                RefTarget::IncludeAngle(spec) => (None, format!("<{spec}>"), Mechanism::Include),
            };
            match resolved {
                Some(to) if to == *rel => {
                    warnings.push(ExtractWarning {
                        path: rel.clone(),
                        message: format!("self-{mechanism} of `{spec}` at line {} ignored", r.line),
                    });
                }
                Some(to) => edges.push(DepEdge {
                    from: rel.clone(),
                    to,
                    mechanism,
                    site: Site::Line(r.line),
                }),
                None => unresolved.push(Unresolved {
                    from: rel.clone(),
                    target: spec,
                }),
            }
        }
    }

    let mut pins = BTreeMap::new();
    if let Some(manifest) = &manifest {
        for (edge, site) in manifest.edge_sites() {
            for p in [&edge.from, &edge.to] {
                nodes.entry(p.clone()).or_insert_with(|| FileNode {
                    path: p.clone(),
                    role: role_for_path(p),
                    grammar: Some("manifest".to_string()),
                });
            }
            edges.push(DepEdge {
                from: edge.from.clone(),
                to: edge.to.clone(),
                mechanism: edge.mechanism,
                site,
            });
        }
        pins = manifest.pin_map();
        for path in pins.keys() {
            if !nodes.contains_key(path) {
                warnings.push(ExtractWarning {
                    path: path.clone(),
                    message: "manifest pins a file that is not in the graph".to_string(),
                });
            }
        }
        pins.retain(|path, _| nodes.contains_key(path));
    }

    let mut graph = DependencyGraph::new(nodes.into_values().collect(), edges)?;
    graph.set_unresolved(unresolved);
    graph.set_pins(pins);
    graph.set_digest(digest);
    Ok(Extraction { graph, warnings })
}
