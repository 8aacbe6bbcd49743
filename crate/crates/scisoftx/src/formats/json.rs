//! Canonical JSON for document models, code indexes and graphs: two-space
//! indentation, keys in declaration order, trailing newline.

use serde::{Deserialize, Serialize};
use scisoftx_core::code::{Diagnostic, IndexError};
use scisoftx_core::graph::LinkGraph;
use scisoftx_core::{CodeEntity, CodeIndex, DocumentModel, ModelError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("invalid JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("invalid document model: {0}")]
    Model(#[from] ModelError),
    #[error("invalid code index: {0}")]
    Index(#[from] IndexError),
    #[error("invalid graph: {0}")]
    Graph(String),
}

pub fn to_canonical_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("model types always serialize");
    s.push('\n');
    s
}

pub fn document_to_json(doc: &DocumentModel) -> String {
    to_canonical_json(doc)
}

pub fn document_from_json(bytes: &[u8]) -> Result<DocumentModel, JsonError> {
    let doc: DocumentModel = serde_json::from_slice(bytes)?;
    doc.validate()?;
    Ok(doc)
}

#[derive(Serialize)]
struct IndexOut<'a> {
    root_dir: &'a str,
    source_digest: &'a str,
    entities: &'a [CodeEntity],
    diagnostics: &'a [Diagnostic],
}

#[derive(Deserialize)]
struct IndexIn {
    root_dir: String,
    source_digest: String,
    entities: Vec<CodeEntity>,
    #[serde(default)]
    diagnostics: Vec<Diagnostic>,
}

pub fn index_to_json(index: &CodeIndex) -> String {
    to_canonical_json(&IndexOut {
        root_dir: index.root_dir(),
        source_digest: index.source_digest(),
        entities: index.entities(),
        diagnostics: index.diagnostics(),
    })
}

pub fn index_from_json(bytes: &[u8]) -> Result<CodeIndex, JsonError> {
    let raw: IndexIn = serde_json::from_slice(bytes)?;
    Ok(CodeIndex::from_parts(raw.root_dir, raw.source_digest, raw.entities, raw.diagnostics)?)
}

pub fn graph_to_json(graph: &LinkGraph) -> String {
    to_canonical_json(graph)
}

pub fn graph_from_json(bytes: &[u8]) -> Result<LinkGraph, JsonError> {
    let graph: LinkGraph = serde_json::from_slice(bytes)?;
    graph.check().map_err(JsonError::Graph)?;
    Ok(graph)
}
