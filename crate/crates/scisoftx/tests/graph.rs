mod common;

use std::collections::BTreeMap;

use scisoftx::extract::extract_spans;
use scisoftx::formats::{graph_from_json, graph_to_json};
use scisoftx::repo::build_index;
use scisoftx::synth::corpus::{generate_document, write_document};
use scisoftx_core::graph::{build_file_graph, build_package_graph, GraphLevel, LinkGraph, NodeKind};
use scisoftx_core::links::link_id;
use scisoftx_core::{CodeIndex, EntityKind, Label, Link, LinkSet, LinkerParams, Origin, Profile};

/// Whether some entity that lives in a file carries the link's qualified
/// name, or the link's file is indexed.
fn resolvable(index: &CodeIndex, link: &Link) -> bool {
    index
        .entities()
        .iter()
        .any(|e| !e.file_path.is_empty() && (e.qualified_name == link.target_qname || e.file_path == link.target_file))
}

/// Package node for a file: the package directly holding the file entity,
/// or the top-level directory (else the root) for files under the root.
fn package_of_file(index: &CodeIndex, path: &str) -> String {
    let file = index
        .entities()
        .iter()
        .find(|e| e.kind == EntityKind::File && e.file_path == path)
        .unwrap();
    let parent = index.entity(file.parent_id.unwrap()).unwrap();
    if parent.parent_id.is_some() {
        return format!("k:{}", parent.qualified_name);
    }
    match path.split_once('/') {
        Some((top, _)) => format!("k:{top}"),
        None => format!("k:{}", parent.qualified_name),
    }
}

fn edges(g: &LinkGraph) -> BTreeMap<(String, String), u32> {
    g.edges.iter().map(|e| ((e.source.clone(), e.target.clone()), e.weight)).collect()
}

/// Collapses mentions to pages and files to packages, summing weights.
fn collapse(file_graph: &LinkGraph, index: &CodeIndex) -> BTreeMap<(String, String), u32> {
    let mut out = BTreeMap::new();
    for e in &file_graph.edges {
        let page = e.source.split(':').nth(1).unwrap();
        let path = e.target.strip_prefix("f:").unwrap();
        *out.entry((format!("p:{page}"), package_of_file(index, path))).or_insert(0) += e.weight;
    }
    out
}

fn check_conservation(set: &LinkSet, index: &CodeIndex) {
    let file = build_file_graph(set, index);
    let package = build_package_graph(set, index);
    file.graph.check().unwrap();
    package.graph.check().unwrap();
    let expected = set.links().iter().filter(|l| resolvable(index, l)).count() as u64;
    assert_eq!(package.graph.total_weight(), expected);
    assert_eq!(file.graph.total_weight(), expected);
    assert_eq!(file.unresolved.len() as u64, set.len() as u64 - expected);
    assert_eq!(collapse(&file.graph, index), edges(&package.graph));
}

fn corpus_case(n: usize) -> (LinkSet, LinkSet, CodeIndex) {
    let doc = generate_document(n, 11);
    let dir = tempfile::tempdir().unwrap();
    write_document(dir.path(), &doc).unwrap();
    let index = build_index(&dir.path().join("repo"), &Profile::ALL.into_iter().collect()).unwrap();
    let model = extract_spans(&doc.pdf).unwrap();
    let predicted = scisoftx_core::linker::link_document(&model, &index, &LinkerParams::default());
    (doc.gold, predicted, index)
}

#[test]
fn weights_are_conserved_on_corpus_documents() {
    for n in 0..4 {
        let (gold, predicted, index) = corpus_case(n);
        check_conservation(&gold, &index);
        check_conservation(&predicted, &index);
    }
}

#[test]
fn unresolvable_links_are_left_out() {
    let (mut gold, _, index) = corpus_case(1);
    let ghost = Link {
        link_id: link_id(1, 1, 0, 5, "nowhere.Ghost"),
        page: 1,
        line: 1,
        char_start: 0,
        char_end: 5,
        snippet: "Ghost".into(),
        target_qname: "nowhere.Ghost".into(),
        target_file: "nowhere/ghost.py".into(),
        target_line: 1,
        label: Label::Mentions,
        origin: Origin::Manual,
        score: 0,
    };
    gold.add_link(ghost).unwrap();
    let build = build_package_graph(&gold, &index);
    assert_eq!(build.unresolved.len(), 1);
    assert_eq!(build.unresolved[0].target_qname, "nowhere.Ghost");
    check_conservation(&gold, &index);
}

#[test]
fn graphs_are_bipartite_by_level() {
    let (gold, _, index) = corpus_case(0);
    let file = build_file_graph(&gold, &index).graph;
    assert_eq!(file.level, GraphLevel::File);
    let kinds: BTreeMap<&str, NodeKind> = file.nodes.iter().map(|n| (n.node_id.as_str(), n.kind)).collect();
    for e in &file.edges {
        assert_eq!(kinds[e.source.as_str()], NodeKind::Mention);
        assert_eq!(kinds[e.target.as_str()], NodeKind::File);
    }
    let package = build_package_graph(&gold, &index).graph;
    assert!(package.nodes.iter().all(|n| matches!(n.kind, NodeKind::Page | NodeKind::Package)));
}

#[test]
fn empty_link_sets_give_empty_graphs() {
    let (gold, _, index) = corpus_case(0);
    let empty = LinkSet::new(gold.document_digest.clone(), gold.code_digest.clone());
    for g in [build_file_graph(&empty, &index).graph, build_package_graph(&empty, &index).graph] {
        assert!(g.nodes.is_empty() && g.edges.is_empty());
        g.check().unwrap();
    }
}

#[test]
fn graph_json_round_trips() {
    let (gold, _, index) = corpus_case(2);
    let g = build_package_graph(&gold, &index).graph;
    let json = graph_to_json(&g);
    common::check_graph_json(&serde_json::from_str(&json).unwrap()).unwrap();
    assert_eq!(graph_from_json(json.as_bytes()).unwrap(), g);
    let mut broken: serde_json::Value = serde_json::from_str(&json).unwrap();
    broken["edges"][0]["weight"] = 0.into();
    assert!(graph_from_json(broken.to_string().as_bytes()).is_err());
}
