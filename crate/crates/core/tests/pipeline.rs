//! End-to-end pipeline properties: graph -> classification -> model ->
//! verdict, plus the probe-driven classifier on scripted fixtures.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use proptest::prelude::*;

use mereoscan::classify::probe::{ProbeSpec, SuccessCriterion};
use mereoscan::classify::{classify_participation, Basis, Evidence, Mode};
use mereoscan::config::AnalysisMode;
use mereoscan::graph::algo::find_entry_points;
use mereoscan::graph::extract::{extract_dependencies, Grammar};
use mereoscan::graph::{DepEdge, DependencyGraph, EdgeFilter, FileNode, FileRole, Mechanism, Site};
use mereoscan::model::axioms::{eval_unity, AggregateClass};
use mereoscan::model::RelationKind;
use mereoscan::verdict::report::{parse_report, print_report_structured};
use mereoscan::verdict::{build_model, issue_verdict, whole_id_for_component, VerdictOptions};

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
    let mut g = DependencyGraph::new(nodes, dep_edges).unwrap();
    let entries = find_entry_points(&g, None).unwrap();
    g.set_entries(entries).unwrap();
    g
}

fn graph_only_classification(
    g: &DependencyGraph,
) -> Vec<mereoscan::classify::ParticipationClassification> {
    classify_participation(g, None, None, &BTreeMap::new(), EdgeFilter::default()).unwrap()
}

prop_compose! {
    fn random_graph()(n in 1usize..=50)(
        n in Just(n),
        edges in prop::collection::vec((0..n, 0..n), 0..=120),
    ) -> (usize, Vec<(usize, usize)>) {
        (n, edges)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn built_models_satisfy_unity_per_component((n, edges) in random_graph()) {
        let g = make_graph(n, &edges);
        let cls = graph_only_classification(&g);
        let model = build_model(&g, &cls, AnalysisMode::Source, EdgeFilter::default()).unwrap();
        let unity = eval_unity(&model, RelationKind::GenuineFp, RelationKind::Binding).unwrap();
        prop_assert!(unity.sat, "{:?}", unity.counterexamples);
    }

    #[test]
    fn removing_one_bond_flips_exactly_that_component((n, edges) in random_graph()) {
        let g = make_graph(n, &edges);
        let cls = graph_only_classification(&g);
        let model = build_model(&g, &cls, AnalysisMode::Source, EdgeFilter::default()).unwrap();
        let Some(bond) = model
            .tuples_under(RelationKind::Binding)
            .next()
            .cloned()
        else {
            // no two-part component in this graph; nothing to remove
            return Ok(());
        };
        let broken = model.without_tuple(&bond);
        let unity = eval_unity(&broken, RelationKind::GenuineFp, RelationKind::Binding).unwrap();
        prop_assert!(!unity.sat);
        // every counterexample names the removed pair's component whole and
        // the removed pair itself shows up as the failing pair
        let wholes: BTreeSet<&str> = unity
            .counterexamples
            .iter()
            .map(|c| c.whole.as_str())
            .collect();
        prop_assert_eq!(wholes.len(), 1);
        let names_removed_pair = unity
            .counterexamples
            .iter()
            .any(|c| c.x == bond.first && c.z == bond.second);
        prop_assert!(names_removed_pair);
    }

    #[test]
    fn infringement_units_invariant_under_renames((n, edges) in random_graph()) {
        let g = make_graph(n, &edges);
        let cls = graph_only_classification(&g);
        let model = build_model(&g, &cls, AnalysisMode::Source, EdgeFilter::default()).unwrap();
        let report = issue_verdict(&model, &g, &VerdictOptions::default()).unwrap();

        // rename every file (reversing lexicographic order) and reverse the
        // edge list; the unit count must not move
        let rename = |i: usize| format!("z{:02}.py", n - 1 - i);
        let nodes = (0..n)
            .map(|i| FileNode {
                path: rename(i),
                role: FileRole::Source,
                grammar: Some("python".into()),
            })
            .collect();
        let mut dep_edges: Vec<DepEdge> = edges
            .iter()
            .filter(|(f, t)| f != t)
            .map(|(f, t)| DepEdge {
                from: rename(*f),
                to: rename(*t),
                mechanism: Mechanism::Import,
                site: Site::Line(1),
            })
            .collect();
        dep_edges.reverse();
        let mut renamed = DependencyGraph::new(nodes, dep_edges).unwrap();
        let entries = find_entry_points(&renamed, None).unwrap();
        renamed.set_entries(entries).unwrap();

        let cls2 = graph_only_classification(&renamed);
        let model2 =
            build_model(&renamed, &cls2, AnalysisMode::Source, EdgeFilter::default()).unwrap();
        let report2 = issue_verdict(&model2, &renamed, &VerdictOptions::default()).unwrap();

        prop_assert_eq!(report.infringement_units, report2.infringement_units);
        prop_assert_eq!(report.verdicts.len(), report2.verdicts.len());
    }
}

#[test]
fn whole_ids_derive_from_smallest_component_path() {
    let comp: BTreeSet<String> = ["b.py".to_string(), "a.py".to_string()].into_iter().collect();
    assert_eq!(whole_id_for_component(&comp).as_str(), "component://a.py");
}

#[test]
fn report_round_trips_through_structured_form() {
    let g = make_graph(4, &[(0, 1), (1, 2), (0, 3)]);
    let cls = graph_only_classification(&g);
    let model = build_model(&g, &cls, AnalysisMode::Source, EdgeFilter::default()).unwrap();
    let report = issue_verdict(&model, &g, &VerdictOptions::default()).unwrap();
    let printed = print_report_structured(&report);
    let parsed = parse_report(&printed).unwrap();
    assert_eq!(parsed, report);
    assert_eq!(print_report_structured(&parsed), printed);
}

#[test]
fn functional_whole_verdicts_have_no_counterexamples_and_files() {
    let g = make_graph(5, &[(0, 1), (0, 2), (2, 3), (2, 4)]);
    let cls = graph_only_classification(&g);
    let model = build_model(&g, &cls, AnalysisMode::Source, EdgeFilter::default()).unwrap();
    let report = issue_verdict(&model, &g, &VerdictOptions::default()).unwrap();
    for v in &report.verdicts {
        assert!(!v.files.is_empty());
        if v.class == AggregateClass::FunctionalWhole {
            assert!(v.counterexamples.is_empty());
        }
    }
}

// ---------------------------------------------------------------------------
// Probe-driven classification on a scripted fixture
// ---------------------------------------------------------------------------

/// A tree whose probe is a shell script checking the two files the "program"
/// genuinely needs; `unused_a.py` and `unused_b.py` can be removed freely,
/// `pairs.txt` works with any replacement that has at least one line.
fn probe_fixture(root: &Path) {
    fs::write(root.join("main.py"), "import used\n").unwrap();
    fs::write(root.join("used.py"), "x = 1\n").unwrap();
    fs::write(root.join("unused_a.py"), "a = 1\n").unwrap();
    fs::write(root.join("unused_b.py"), "import unused_a\n").unwrap();
    fs::write(root.join("pairs.txt"), "k:v\n").unwrap();
    fs::write(
        root.join("check.sh"),
        "#!/bin/sh\ntest -f main.py && test -f used.py && test -s pairs.txt\n",
    )
    .unwrap();
}

fn probe_spec() -> ProbeSpec {
    ProbeSpec {
        command: "sh check.sh".to_string(),
        staging_prefix: None,
        success: SuccessCriterion::ExitZero,
        timeout: std::time::Duration::from_secs(10),
    }
}

fn scan(root: &Path) -> DependencyGraph {
    let mut graph = extract_dependencies(root, &[Grammar::Python], None)
        .unwrap()
        .graph;
    let entries = find_entry_points(&graph, Some(&["main.py".to_string()])).unwrap();
    graph.set_entries(entries).unwrap();
    graph
}

#[test]
fn probe_pass_classifies_against_the_scripted_program() {
    let dir = tempfile::tempdir().unwrap();
    probe_fixture(dir.path());
    let graph = scan(dir.path());
    let replacements: BTreeMap<String, std::path::PathBuf> = BTreeMap::new();

    let cls = classify_participation(
        &graph,
        Some(dir.path()),
        Some(&probe_spec()),
        &replacements,
        EdgeFilter::default(),
    )
    .unwrap();
    let by_file: BTreeMap<&str, &mereoscan::classify::ParticipationClassification> =
        cls.iter().map(|c| (c.file.as_str(), c)).collect();

    assert_eq!(by_file["main.py"].mode, Mode::Mandatory);
    assert!(by_file["main.py"].evidence.contains(&Evidence::RemovalProbeFailed));
    assert_eq!(by_file["used.py"].mode, Mode::Mandatory);
    assert_eq!(by_file["unused_a.py"].mode, Mode::Optional);
    assert!(by_file["unused_a.py"]
        .evidence
        .contains(&Evidence::RemovalProbePassed));
    assert_eq!(by_file["unused_b.py"].mode, Mode::Optional);
    assert_eq!(by_file["pairs.txt"].mode, Mode::Mandatory);
    assert!(cls
        .iter()
        .filter(|c| c.evidence.iter().any(|e| e.is_probe_observation()))
        .all(|c| c.basis == Basis::Probe));
}

#[test]
fn replacement_stub_distinguishes_mandatory_from_essential() {
    let dir = tempfile::tempdir().unwrap();
    probe_fixture(dir.path());
    let stub = dir.path().join("stub_pairs.txt");
    fs::write(&stub, "k:v\nextra:w\n").unwrap();
    let empty_stub = dir.path().join("empty_stub.txt");
    fs::write(&empty_stub, "").unwrap();

    let graph = scan(dir.path());

    // a working replacement: pairs.txt is mandatory, not essential
    let replacements: BTreeMap<String, std::path::PathBuf> =
        [("pairs.txt".to_string(), stub)].into_iter().collect();
    let cls = classify_participation(
        &graph,
        Some(dir.path()),
        Some(&probe_spec()),
        &replacements,
        EdgeFilter::default(),
    )
    .unwrap();
    let pairs = cls.iter().find(|c| c.file == "pairs.txt").unwrap();
    assert_eq!(pairs.mode, Mode::Mandatory);
    assert!(pairs.evidence.contains(&Evidence::ReplacementProbePassed));

    // a rejected replacement (empty file fails `test -s`): essential
    let replacements: BTreeMap<String, std::path::PathBuf> =
        [("pairs.txt".to_string(), empty_stub)].into_iter().collect();
    let cls = classify_participation(
        &graph,
        Some(dir.path()),
        Some(&probe_spec()),
        &replacements,
        EdgeFilter::default(),
    )
    .unwrap();
    let pairs = cls.iter().find(|c| c.file == "pairs.txt").unwrap();
    assert_eq!(pairs.mode, Mode::Essential);
    assert!(pairs.evidence.contains(&Evidence::ReplacementProbeFailed));
}

#[test]
fn probe_classification_is_idempotent_for_deterministic_probes() {
    let dir = tempfile::tempdir().unwrap();
    probe_fixture(dir.path());
    let graph = scan(dir.path());
    let replacements = BTreeMap::new();
    let run = || {
        classify_participation(
            &graph,
            Some(dir.path()),
            Some(&probe_spec()),
            &replacements,
            EdgeFilter::default(),
        )
        .unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn removing_probe_optional_files_keeps_the_suite_passing() {
    let dir = tempfile::tempdir().unwrap();
    probe_fixture(dir.path());
    let graph = scan(dir.path());
    let replacements = BTreeMap::new();
    let cls = classify_participation(
        &graph,
        Some(dir.path()),
        Some(&probe_spec()),
        &replacements,
        EdgeFilter::default(),
    )
    .unwrap();

    // drop every probe-optional file for real, then re-run the whole suite
    let optional: Vec<&str> = cls
        .iter()
        .filter(|c| c.is_optional() && c.basis == Basis::Probe)
        .map(|c| c.file.as_str())
        .collect();
    assert!(!optional.is_empty());
    for f in &optional {
        fs::remove_file(dir.path().join(f)).unwrap();
    }

    let graph = scan(dir.path());
    let cls = classify_participation(
        &graph,
        Some(dir.path()),
        Some(&probe_spec()),
        &replacements,
        EdgeFilter::default(),
    )
    .unwrap();
    assert!(cls.iter().all(|c| c.mode != Mode::Unknown));
    // the remaining program still judges its own parts the same way
    for c in &cls {
        if c.file == "main.py" || c.file == "used.py" || c.file == "pairs.txt" {
            assert_eq!(c.mode, Mode::Mandatory, "{}", c.file);
        }
    }
}

#[test]
fn probe_timeout_yields_unknown_mode() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("main.py"), "import used\n").unwrap();
    fs::write(dir.path().join("used.py"), "").unwrap();
    let graph = scan(dir.path());
    let slow = ProbeSpec {
        timeout: std::time::Duration::from_millis(100),
        ..ProbeSpec::new("sleep 5", 1)
    };
    let cls = classify_participation(
        &graph,
        Some(dir.path()),
        Some(&slow),
        &BTreeMap::new(),
        EdgeFilter::default(),
    )
    .unwrap();
    for c in &cls {
        assert_eq!(c.mode, Mode::Unknown, "{}", c.file);
        assert!(c.evidence.contains(&Evidence::ProbeTimeout));
        assert_eq!(c.basis, Basis::Probe);
    }
}

#[test]
fn staging_failure_names_the_file() {
    let err = mereoscan::classify::probe::stage_without(
        Path::new("/no/such/tree/anywhere"),
        "main.py",
        &probe_spec(),
    )
    .unwrap_err();
    assert!(err.to_string().contains("main.py"), "{err}");
}

#[test]
fn decision_table_replays_every_probe_classification() {
    let dir = tempfile::tempdir().unwrap();
    probe_fixture(dir.path());
    let graph = scan(dir.path());
    let replacements = BTreeMap::new();
    let cls = classify_participation(
        &graph,
        Some(dir.path()),
        Some(&probe_spec()),
        &replacements,
        EdgeFilter::default(),
    )
    .unwrap();
    for c in &cls {
        assert_eq!(
            mereoscan::classify::mode_from_evidence(&c.evidence),
            c.mode,
            "decision table must re-derive {} from {:?}",
            c.file,
            c.evidence
        );
    }
}

#[test]
fn compiled_mode_pipeline_over_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("artifact.json");
    fs::write(
        &manifest,
        r#"{"schema":"edges/v1","edges":[
            {"from":"tool.exe","to":"engine.dll","mechanism":"link","site":"link[0]"},
            {"from":"tool.exe","to":"settings.ini","mechanism":"data-read","site":"init"},
            {"from":"tool.exe","to":"locale.xml","mechanism":"data-read","site":"locale"}
        ]}"#,
    )
    .unwrap();
    let mut graph = extract_dependencies(dir.path(), &[], Some(&manifest))
        .unwrap()
        .graph;
    graph
        .set_entries(["tool.exe".to_string()].into_iter().collect())
        .unwrap();
    let cls = graph_only_classification(&graph);
    let model = build_model(&graph, &cls, AnalysisMode::Compiled, EdgeFilter::default()).unwrap();
    assert_eq!(model.binding_name(), "linked");
    let report = issue_verdict(
        &model,
        &graph,
        &VerdictOptions {
            mode: AnalysisMode::Compiled,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(report.verdicts.len(), 1);
    assert_eq!(report.verdicts[0].class, AggregateClass::FunctionalWhole);
    assert_eq!(report.verdicts[0].binding_name, "linked");
    assert_eq!(report.noncontingency.counterexample_model, "object-code-library");
    assert!(report.noncontingency.sat);
    assert_eq!(report.infringement_units, 1);

    // binding tuples match the closure of the manifest edges
    assert!(model.has_tuple(
        RelationKind::Binding,
        &mereoscan::model::EntityId::new("engine.dll"),
        &mereoscan::model::EntityId::new("locale.xml"),
        0
    ));
}
