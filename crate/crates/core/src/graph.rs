//! Bipartite aggregation of a link set at two granularities: mentions to
//! files, and pages to packages.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::code::{CodeEntity, CodeIndex, EntityKind};
use crate::links::{Link, LinkSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphLevel {
    File,
    Package,
}

impl GraphLevel {
    pub fn as_str(self) -> &'static str {
        match self {
            GraphLevel::File => "file",
            GraphLevel::Package => "package",
        }
    }
}

impl core::str::FromStr for GraphLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "file" => Ok(GraphLevel::File),
            "package" => Ok(GraphLevel::Package),
            other => Err(format!("unknown graph level {other:?} (expected file or package)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Mention,
    File,
    Page,
    Package,
}

impl NodeKind {
    /// Mentions and pages sit on the publication side.
    pub fn is_publication_side(self) -> bool {
        matches!(self, NodeKind::Mention | NodeKind::Page)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub node_id: String,
    pub kind: NodeKind,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub source: String,
    pub target: String,
    pub weight: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkGraph {
    pub level: GraphLevel,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

/// A link whose target could not be found in the index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnresolvableTarget {
    pub link_id: String,
    pub target_qname: String,
    pub target_file: String,
}

impl core::fmt::Display for UnresolvableTarget {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "link {}: target {} ({}) is not in the code index",
            self.link_id, self.target_qname, self.target_file
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphBuild {
    pub graph: LinkGraph,
    pub unresolved: Vec<UnresolvableTarget>,
}

/// Finds the entity a stored link points at: by qualified name, preferring
/// the recorded file and line, else the file entity for `target_file`.
/// Only entities that live in a file count.
pub fn resolve_target<'a>(index: &'a CodeIndex, link: &Link) -> Option<&'a CodeEntity> {
    let by_name: Vec<&CodeEntity> = index
        .qname_map()
        .get(&link.target_qname)
        .into_iter()
        .flatten()
        .filter_map(|&id| index.entity(id))
        .filter(|e| !e.file_path.is_empty())
        .collect();
    let exact = by_name
        .iter()
        .find(|e| e.file_path == link.target_file && e.line_start == link.target_line);
    let same_file = by_name.iter().find(|e| e.file_path == link.target_file);
    exact
        .or(same_file)
        .or(by_name.first())
        .copied()
        .or_else(|| index.file_entity(&link.target_file))
}

/// Package label for an entity: its innermost package, or for entities
/// directly under the root, the top-level directory of its file.
pub fn package_of(index: &CodeIndex, entity: &CodeEntity) -> String {
    let root = index.root();
    match index.innermost_package(entity.entity_id) {
        Some(pkg) if pkg.entity_id != root.entity_id => pkg.qualified_name.clone(),
        _ => match entity.file_path.split_once('/') {
            Some((top, _)) if !top.is_empty() => top.to_string(),
            _ => root.qualified_name.clone(),
        },
    }
}

struct Accumulator {
    level: GraphLevel,
    nodes: BTreeMap<String, Node>,
    edges: BTreeMap<(String, String), u32>,
}

impl Accumulator {
    fn new(level: GraphLevel) -> Self {
        Accumulator {
            level,
            nodes: BTreeMap::new(),
            edges: BTreeMap::new(),
        }
    }

    fn node(&mut self, node_id: String, kind: NodeKind, label: impl FnOnce() -> String) -> String {
        self.nodes.entry(node_id.clone()).or_insert_with(|| Node {
            node_id: node_id.clone(),
            kind,
            label: label(),
        });
        node_id
    }

    fn edge(&mut self, source: String, target: String) {
        *self.edges.entry((source, target)).or_insert(0) += 1;
    }

    fn finish(self) -> LinkGraph {
        LinkGraph {
            level: self.level,
            nodes: self.nodes.into_values().collect(),
            edges: self
                .edges
                .into_iter()
                .map(|((source, target), weight)| Edge { source, target, weight })
                .collect(),
        }
    }
}

fn build<F>(set: &LinkSet, index: &CodeIndex, level: GraphLevel, mut add: F) -> GraphBuild
where
    F: FnMut(&mut Accumulator, &Link, &CodeEntity),
{
    let mut acc = Accumulator::new(level);
    let mut unresolved = Vec::new();
    for link in set.links() {
        match resolve_target(index, link) {
            Some(entity) => add(&mut acc, link, entity),
            None => unresolved.push(UnresolvableTarget {
                link_id: link.link_id.clone(),
                target_qname: link.target_qname.clone(),
                target_file: link.target_file.clone(),
            }),
        }
    }
    GraphBuild {
        graph: acc.finish(),
        unresolved,
    }
}

/// Mention-to-file graph: one node per mention position, one per file.
pub fn build_file_graph(set: &LinkSet, index: &CodeIndex) -> GraphBuild {
    build(set, index, GraphLevel::File, |acc, link, entity| {
        let mention = acc.node(
            format!("m:{}:{}:{}", link.page, link.line, link.char_start),
            NodeKind::Mention,
            || format!("p{}:l{} {}", link.page, link.line, link.snippet),
        );
        let path = &entity.file_path;
        let file = acc.node(format!("f:{path}"), NodeKind::File, || path.clone());
        acc.edge(mention, file);
    })
}

/// Page-to-package graph; edge weights count the links aggregated into each pair.
pub fn build_package_graph(set: &LinkSet, index: &CodeIndex) -> GraphBuild {
    build(set, index, GraphLevel::Package, |acc, link, entity| {
        let page = acc.node(format!("p:{}", link.page), NodeKind::Page, || format!("page {}", link.page));
        let name = package_of(index, entity);
        let package = acc.node(format!("k:{name}"), NodeKind::Package, || name.clone());
        acc.edge(page, package);
    })
}

impl LinkGraph {
    /// Checks bipartiteness, level/kind agreement, sortedness, and that edges
    /// reference existing nodes with positive, unique weights.
    pub fn check(&self) -> Result<(), String> {
        let allowed: &[NodeKind] = match self.level {
            GraphLevel::File => &[NodeKind::Mention, NodeKind::File],
            GraphLevel::Package => &[NodeKind::Page, NodeKind::Package],
        };
        let mut kinds = BTreeMap::new();
        for w in self.nodes.windows(2) {
            if w[0].node_id >= w[1].node_id {
                return Err(format!("nodes not strictly sorted at {}", w[1].node_id));
            }
        }
        for n in &self.nodes {
            if !allowed.contains(&n.kind) {
                return Err(format!("node {} has kind {:?} at level {:?}", n.node_id, n.kind, self.level));
            }
            kinds.insert(n.node_id.as_str(), n.kind);
        }
        for w in self.edges.windows(2) {
            if (&w[0].source, &w[0].target) >= (&w[1].source, &w[1].target) {
                return Err(format!("edges not strictly sorted at {} -> {}", w[1].source, w[1].target));
            }
        }
        for e in &self.edges {
            let (Some(s), Some(t)) = (kinds.get(e.source.as_str()), kinds.get(e.target.as_str())) else {
                return Err(format!("dangling edge {} -> {}", e.source, e.target));
            };
            if !s.is_publication_side() || t.is_publication_side() {
                return Err(format!("edge {} -> {} is not publication-to-code", e.source, e.target));
            }
            if e.weight == 0 {
                return Err(format!("edge {} -> {} has zero weight", e.source, e.target));
            }
        }
        Ok(())
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.iter().map(|e| e.weight as u64).sum()
    }
}

/// Entity kinds that can be drawn on the code side of a file graph.
pub fn has_file(entity: &CodeEntity) -> bool {
    entity.kind != EntityKind::Package && !entity.file_path.is_empty()
}
