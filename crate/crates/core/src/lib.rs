//! Allocation-only core of scisoftx.
//!
//! Everything in here is pure computation over in-memory values: deciding
//! whether a font is monospace, clustering positioned text into lines,
//! scanning source text into a containment model of code entities, finding
//! code mentions and resolving them against that model, curating the
//! resulting link set, aggregating it into graphs, and scoring it against
//! gold annotations. Reading PDFs, walking directories, file formats and the
//! command line live in the `scisoftx` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod code;
pub mod digest;
pub mod document;
pub mod eval;
pub mod font;
pub mod graph;
pub mod layout;
pub mod linker;
pub mod links;
pub mod tokenize;

pub use code::{CodeEntity, CodeIndex, EntityId, EntityKind, IndexBuilder, Profile};
pub use document::{DocumentModel, ModelError, SpanId, TextSpan};
pub use font::{detect_monospace, FontInfo};
pub use linker::{LinkerParams, MentionCandidate, ResolvedLink};
pub use links::{Label, Link, LinkError, LinkSet, Origin};
