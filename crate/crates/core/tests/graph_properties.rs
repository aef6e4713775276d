//! Property tests for the graph algorithms, cross-checked against
//! independent oracles (Kahn counting for acyclicity, plain BFS for
//! reachability).

use std::collections::{BTreeSet, VecDeque};

use proptest::prelude::*;

use mereoscan::graph::algo::{
    connected_components, detect_cycles, detect_orphans, find_entry_points, sc_graph_path,
    DEFAULT_CYCLE_CAP,
};
use mereoscan::graph::{DepEdge, DependencyGraph, EdgeFilter, FileNode, FileRole, Mechanism, Site};

fn node_name(i: usize) -> String {
    format!("f{i:02}.py")
}

fn make_graph(n: usize, edges: &[(usize, usize)]) -> DependencyGraph {
    let nodes = (0..n)
        .map(|i| FileNode {
            path: node_name(i),
            role: FileRole::Source,
            grammar: Some("python".into()),
        })
        .collect();
    let dep_edges = edges
        .iter()
        .filter(|(f, t)| f != t)
        .map(|(f, t)| DepEdge {
            from: node_name(*f),
            to: node_name(*t),
            mechanism: Mechanism::Import,
            site: Site::Line(1),
        })
        .collect();
    DependencyGraph::new(nodes, dep_edges).unwrap()
}

prop_compose! {
    fn random_graph()(n in 1usize..=50)(
        n in Just(n),
        edges in prop::collection::vec((0..n, 0..n), 0..=120),
    ) -> (usize, Vec<(usize, usize)>) {
        (n, edges)
    }
}

/// Kahn-style counting check: a digraph is acyclic iff all nodes drain.
fn kahn_is_acyclic(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for (f, t) in edges {
        if f != t {
            succ[*f].insert(*t);
        }
    }
    let mut indegree = vec![0usize; n];
    for s in &succ {
        for &t in s {
            indegree[t] += 1;
        }
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|i| indegree[*i] == 0).collect();
    let mut drained = 0;
    while let Some(u) = queue.pop_front() {
        drained += 1;
        for &w in &succ[u] {
            indegree[w] -= 1;
            if indegree[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    drained == n
}

/// Undirected reachability by plain BFS.
fn undirected_reachable(n: usize, edges: &[(usize, usize)], from: usize) -> BTreeSet<usize> {
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for (f, t) in edges {
        if f != t {
            adj[*f].insert(*t);
            adj[*t].insert(*f);
        }
    }
    let mut seen = BTreeSet::from([from]);
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        for &w in &adj[u] {
            if seen.insert(w) {
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Full elementary-cycle enumeration by exhaustive simple-path DFS,
/// deduplicated by rotating each cycle to its smallest node.
fn brute_force_cycles(n: usize, edges: &[(usize, usize)]) -> BTreeSet<Vec<usize>> {
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for (f, t) in edges {
        if f != t {
            adj[*f].insert(*t);
        }
    }
    fn dfs(
        v: usize,
        start: usize,
        adj: &[BTreeSet<usize>],
        path: &mut Vec<usize>,
        on_path: &mut Vec<bool>,
        out: &mut BTreeSet<Vec<usize>>,
    ) {
        for &w in &adj[v] {
            if w == start {
                let min_pos = path
                    .iter()
                    .enumerate()
                    .min_by_key(|(_, node)| **node)
                    .map(|(i, _)| i)
                    .unwrap();
                let mut canon = path[min_pos..].to_vec();
                canon.extend_from_slice(&path[..min_pos]);
                out.insert(canon);
            } else if !on_path[w] {
                path.push(w);
                on_path[w] = true;
                dfs(w, start, adj, path, on_path, out);
                on_path[w] = false;
                path.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    for start in 0..n {
        let mut path = vec![start];
        let mut on_path = vec![false; n];
        on_path[start] = true;
        dfs(start, start, &adj, &mut path, &mut on_path, &mut out);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(192))]

    #[test]
    fn cycle_enumeration_is_complete_on_small_graphs(
        n in 2usize..=8,
        raw_edges in prop::collection::vec((0usize..8, 0usize..8), 0..=24),
    ) {
        let edges: Vec<(usize, usize)> = raw_edges
            .into_iter()
            .map(|(f, t)| (f % n, t % n))
            .filter(|(f, t)| f != t)
            .collect();
        let graph = make_graph(n, &edges);
        let got: BTreeSet<Vec<usize>> = detect_cycles(&graph, DEFAULT_CYCLE_CAP)
            .cycles
            .into_iter()
            .map(|c| {
                c.into_iter()
                    .map(|p| p[1..3].parse::<usize>().unwrap())
                    .collect()
            })
            .collect();
        prop_assert_eq!(got, brute_force_cycles(n, &edges));
    }

    #[test]
    fn sc_graph_path_agrees_with_components((n, edges) in random_graph()) {
        let graph = make_graph(n, &edges);
        let comps = connected_components(&graph, EdgeFilter::default());

        // partition sanity: every node in exactly one component
        let mut seen = BTreeSet::new();
        for c in &comps {
            for p in c {
                prop_assert!(seen.insert(p.clone()));
            }
        }
        prop_assert_eq!(seen.len(), n);

        // components are discovered in order of their smallest path
        let heads: Vec<&String> = comps.iter().map(|c| c.iter().next().unwrap()).collect();
        let mut sorted = heads.clone();
        sorted.sort();
        prop_assert_eq!(heads, sorted);

        for a in 0..n.min(8) {
            for b in 0..n.min(8) {
                let same = sc_graph_path(&graph, &node_name(a), &node_name(b), EdgeFilter::default())
                    .unwrap();
                let oracle = undirected_reachable(n, &edges, a).contains(&b);
                prop_assert_eq!(same, oracle, "nodes {} and {}", a, b);
            }
        }
    }

    #[test]
    fn empty_cycle_set_iff_topological_order_exists((n, edges) in random_graph()) {
        let graph = make_graph(n, &edges);
        let cycles = detect_cycles(&graph, DEFAULT_CYCLE_CAP);
        prop_assert_eq!(cycles.cycles.is_empty(), kahn_is_acyclic(n, &edges));
    }

    #[test]
    fn orphans_disjoint_from_entry_components((n, edges) in random_graph()) {
        let mut graph = make_graph(n, &edges);
        let entries = find_entry_points(&graph, None).unwrap();
        graph.set_entries(entries.clone()).unwrap();
        let orphans = detect_orphans(&graph, graph.entries(), EdgeFilter::default());

        prop_assert!(orphans.is_disjoint(&entries));
        for entry in &entries {
            let i = entry[1..3].parse::<usize>().unwrap();
            for r in undirected_reachable(n, &edges, i) {
                prop_assert!(!orphans.contains(&node_name(r)));
            }
        }
        // every orphan is undirected-unreachable from every entry
        for orphan in &orphans {
            let oi = orphan[1..3].parse::<usize>().unwrap();
            let reach = undirected_reachable(n, &edges, oi);
            for entry in &entries {
                let ei = entry[1..3].parse::<usize>().unwrap();
                prop_assert!(!reach.contains(&ei));
            }
        }
    }

    #[test]
    fn cycles_are_elementary_and_rooted_at_min((n, edges) in random_graph()) {
        let graph = make_graph(n, &edges);
        let cycles = detect_cycles(&graph, DEFAULT_CYCLE_CAP);
        let edge_set: BTreeSet<(String, String)> = edges
            .iter()
            .filter(|(f, t)| f != t)
            .map(|(f, t)| (node_name(*f), node_name(*t)))
            .collect();
        for cycle in &cycles.cycles {
            // no repeated nodes
            let unique: BTreeSet<&String> = cycle.iter().collect();
            prop_assert_eq!(unique.len(), cycle.len());
            // rooted at the smallest node
            prop_assert_eq!(cycle.iter().min().unwrap(), &cycle[0]);
            // every consecutive pair (and the wrap-around) is a real edge
            for i in 0..cycle.len() {
                let from = &cycle[i];
                let to = &cycle[(i + 1) % cycle.len()];
                prop_assert!(edge_set.contains(&(from.clone(), to.clone())));
            }
        }
    }
}
