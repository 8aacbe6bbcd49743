//! Synthetic test material: PDFs with a known layout and a generated corpus
//! of papers, repositories and gold links.

pub mod corpus;
pub mod fixtures;
pub mod pdf;
