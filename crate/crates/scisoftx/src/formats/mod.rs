//! On-disk formats: canonical JSON artifacts and the XML link file.

pub mod json;
pub mod xml;

pub use json::{
    document_from_json, document_to_json, graph_from_json, graph_to_json, index_from_json, index_to_json,
    to_canonical_json, JsonError,
};
pub use xml::{check_binding, export_xml, import_xml, Binding, XmlError};
