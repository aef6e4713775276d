//! Graph algorithms over the dependency graph: entry-point detection,
//! elementary-cycle enumeration, orphan detection, undirected connectivity.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{DependencyGraph, EdgeFilter, FileRole, GraphError, Mechanism};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgoError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("node `{0}` is not in the graph")]
    UnknownNode(String),
}

/// Default bound on the number of elementary cycles reported.
pub const DEFAULT_CYCLE_CAP: usize = 1000;

/// Entry points: the declared list verbatim when given, otherwise every
/// source-role node with no incoming import, include, or link edge.
pub fn find_entry_points(
    graph: &DependencyGraph,
    declared: Option<&[String]>,
) -> Result<BTreeSet<String>, AlgoError> {
    if let Some(declared) = declared {
        for d in declared {
            if !graph.contains(d) {
                return Err(AlgoError::Graph(GraphError::UnknownEntry(d.clone())));
            }
        }
        return Ok(declared.iter().cloned().collect());
    }
    let mut has_incoming: BTreeSet<&str> = BTreeSet::new();
    for e in graph.edges() {
        if matches!(
            e.mechanism,
            Mechanism::Import | Mechanism::Include | Mechanism::Link
        ) {
            has_incoming.insert(e.to.as_str());
        }
    }
    Ok(graph
        .nodes()
        .filter(|n| n.role == FileRole::Source && !has_incoming.contains(n.path.as_str()))
        .map(|n| n.path.clone())
        .collect())
}

/// Elementary cycles among the import/include edges, capped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleSet {
    /// Each cycle is a node sequence starting at its smallest node; the
    /// list is sorted for determinism.
    pub cycles: Vec<Vec<String>>,
    /// True when enumeration stopped at the cap.
    pub truncated: bool,
}

impl CycleSet {
    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty() && !self.truncated
    }
}

/// Enumerates every elementary cycle among import/include edges, up to `cap`.
///
/// Uses the blocked-search scheme of Johnson's algorithm, rooting each cycle
/// at its smallest node. An empty result is equivalent to the existence of a
/// topological order over those edges.
pub fn detect_cycles(graph: &DependencyGraph, cap: usize) -> CycleSet {
    let index: Vec<&str> = graph.nodes().map(|n| n.path.as_str()).collect();
    let rank: BTreeMap<&str, usize> = index.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let n = index.len();

    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for e in graph.edges() {
        if matches!(e.mechanism, Mechanism::Import | Mechanism::Include) {
            adj[rank[e.from.as_str()]].insert(rank[e.to.as_str()]);
        }
    }

    let mut cycles: Vec<Vec<usize>> = Vec::new();
    let mut truncated = false;

    'starts: for start in 0..n {
        // nodes below the current root belong to earlier iterations; a
        // self-loop shows up as the edge start -> start and yields [start]
        let neighbors = |v: usize, adj: &Vec<BTreeSet<usize>>| -> Vec<usize> {
            adj[v].iter().copied().filter(|w| *w >= start).collect()
        };

        let mut blocked = vec![false; n];
        let mut block_list: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        blocked[start] = true;

        let mut path = vec![start];
        let mut stack: Vec<(usize, Vec<usize>)> = vec![(start, neighbors(start, &adj))];
        let mut found_on_path = vec![false; n];

        fn unblock(v: usize, blocked: &mut [bool], block_list: &mut [BTreeSet<usize>]) {
            let mut queue = vec![v];
            while let Some(u) = queue.pop() {
                if blocked[u] {
                    blocked[u] = false;
                    queue.extend(std::mem::take(&mut block_list[u]));
                }
            }
        }

        while let Some((v, next)) = stack.last_mut() {
            let v = *v;
            if let Some(w) = next.pop() {
                if w == start {
                    cycles.push(path.clone());
                    for &u in &path {
                        found_on_path[u] = true;
                    }
                    if cycles.len() >= cap {
                        truncated = true;
                        break 'starts;
                    }
                } else if !blocked[w] {
                    path.push(w);
                    blocked[w] = true;
                    found_on_path[w] = false;
                    stack.push((w, neighbors(w, &adj)));
                }
            } else {
                if found_on_path[v] {
                    unblock(v, &mut blocked, &mut block_list);
                } else {
                    for w in neighbors(v, &adj) {
                        block_list[w].insert(v);
                    }
                }
                stack.pop();
                path.pop();
                if let Some(&u) = path.last() {
                    if found_on_path[v] {
                        found_on_path[u] = true;
                    }
                }
            }
        }
    }

    let mut named: Vec<Vec<String>> = cycles
        .into_iter()
        .map(|c| c.into_iter().map(|i| index[i].to_string()).collect())
        .collect();
    named.sort();
    named.dedup();
    CycleSet {
        cycles: named,
        truncated,
    }
}

/// Partition of the nodes into undirected connected components over the
/// admitted coupling edges, sorted by each component's smallest path.
pub fn connected_components(graph: &DependencyGraph, filter: EdgeFilter) -> Vec<BTreeSet<String>> {
    let mut neighbors: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for n in graph.nodes() {
        neighbors.entry(n.path.as_str()).or_default();
    }
    for e in graph.edges() {
        if filter.admits(e.mechanism) {
            neighbors.get_mut(e.from.as_str()).unwrap().insert(&e.to);
            neighbors.get_mut(e.to.as_str()).unwrap().insert(&e.from);
        }
    }

    let mut seen: BTreeSet<&str> = BTreeSet::new();
    let mut components = Vec::new();
    for n in graph.nodes() {
        let p = n.path.as_str();
        if seen.contains(p) {
            continue;
        }
        let mut comp = BTreeSet::new();
        let mut queue = VecDeque::from([p]);
        seen.insert(p);
        while let Some(u) = queue.pop_front() {
            comp.insert(u.to_string());
            for &w in &neighbors[u] {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        components.push(comp);
    }
    // BTreeMap iteration already yields components in order of their
    // smallest member, since each component is discovered at that node
    components
}

/// True iff `a` and `b` lie in the same undirected component (reflexively).
pub fn sc_graph_path(
    graph: &DependencyGraph,
    a: &str,
    b: &str,
    filter: EdgeFilter,
) -> Result<bool, AlgoError> {
    for p in [a, b] {
        if !graph.contains(p) {
            return Err(AlgoError::UnknownNode(p.to_string()));
        }
    }
    if a == b {
        return Ok(true);
    }
    Ok(connected_components(graph, filter)
        .iter()
        .any(|c| c.contains(a) && c.contains(b)))
}

/// Orphans: nodes with no undirected coupling path to any entry point.
/// Entries themselves are never orphans.
pub fn detect_orphans(
    graph: &DependencyGraph,
    entries: &BTreeSet<String>,
    filter: EdgeFilter,
) -> BTreeSet<String> {
    let components = connected_components(graph, filter);
    let mut orphans = BTreeSet::new();
    for comp in components {
        if comp.iter().any(|p| entries.contains(p)) {
            continue;
        }
        orphans.extend(comp);
    }
    orphans
}

/// Nodes reachable from the entry set along admitted edges, entries included.
pub fn reachable_from_entries(
    graph: &DependencyGraph,
    entries: &BTreeSet<String>,
    filter: EdgeFilter,
) -> BTreeSet<String> {
    let mut succ: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for e in graph.edges() {
        if filter.admits(e.mechanism) {
            succ.entry(e.from.as_str()).or_default().insert(&e.to);
        }
    }
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut queue: VecDeque<&str> = entries
        .iter()
        .filter(|e| graph.contains(e))
        .map(|e| e.as_str())
        .collect();
    for e in &queue {
        seen.insert(e.to_string());
    }
    while let Some(u) = queue.pop_front() {
        if let Some(ws) = succ.get(u) {
            for &w in ws {
                if seen.insert(w.to_string()) {
                    queue.push_back(w);
                }
            }
        }
    }
    seen
}
