//! Containment model of a source tree.
//!
//! Each shipped [`Profile`] turns one source file into a flat list of
//! [`Decl`]s; [`IndexBuilder`] stitches those under package and file
//! entities into a [`CodeIndex`].

mod entity;
mod index;
mod java;
mod python;

use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

pub use entity::{CodeEntity, EntityId, EntityKind};
pub use index::{CodeIndex, Diagnostic, IndexBuilder, IndexError};

/// A language profile: which files it claims and how it scans them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// Brace-delimited, Java-like.
    Java,
    /// Indentation-delimited, Python-like.
    Python,
}

impl Profile {
    pub const ALL: [Profile; 2] = [Profile::Java, Profile::Python];

    pub fn name(self) -> &'static str {
        match self {
            Profile::Java => "java",
            Profile::Python => "python",
        }
    }

    pub fn from_name(name: &str) -> Option<Profile> {
        Profile::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn extensions(self) -> &'static [&'static str] {
        match self {
            Profile::Java => &["java"],
            Profile::Python => &["py"],
        }
    }

    pub fn keywords(self) -> &'static [&'static str] {
        match self {
            Profile::Java => java::KEYWORDS,
            Profile::Python => python::KEYWORDS,
        }
    }

    /// Whether `path` has one of this profile's extensions.
    pub fn claims(self, path: &str) -> bool {
        match path.rsplit_once('.') {
            Some((stem, ext)) if !stem.is_empty() && !stem.ends_with('/') => {
                self.extensions().contains(&ext)
            }
            _ => false,
        }
    }

    pub(crate) fn scan(self, text: &str) -> Result<ParsedFile, ParseError> {
        match self {
            Profile::Java => java::scan(text),
            Profile::Python => python::scan(text),
        }
    }
}

impl core::fmt::Display for Profile {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// One declaration found by a profile scanner. `parent` indexes an earlier
/// entry of the same list; `None` means the file itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decl {
    pub kind: EntityKind,
    pub name: String,
    pub line_start: u32,
    pub line_end: u32,
    pub parent: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParsedFile {
    /// Package declared inside the file, if the language has such a thing.
    pub package: Option<String>,
    pub decls: Vec<Decl>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: u32,
    pub message: String,
}

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || c == '$'
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '$'
}
