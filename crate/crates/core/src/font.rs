use alloc::string::String;
use serde::{Deserialize, Serialize};

/// Bit 0 of a PDF font descriptor's `/Flags` entry.
pub const FIXED_PITCH: u32 = 1;

/// Lowercase fragments of PostScript names that belong to fixed-pitch
/// families. Covers the Computer Modern / Latin Modern typewriter faces that
/// LaTeX output uses without setting the FixedPitch flag.
pub const MONOSPACE_NAME_HINTS: &[&str] = &[
    "courier",
    "mono",
    "consol",
    "menlo",
    "inconsolata",
    "cmtt",
    "lmtt",
    "typewriter",
    "fixed",
];

/// Returns true when the FixedPitch flag is set or the font name contains one
/// of [`MONOSPACE_NAME_HINTS`], compared case-insensitively.
pub fn detect_monospace(postscript_name: &str, flags: u32) -> bool {
    if flags & FIXED_PITCH != 0 {
        return true;
    }
    let lower = postscript_name.to_ascii_lowercase();
    MONOSPACE_NAME_HINTS.iter().any(|hint| lower.contains(hint))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FontInfo {
    pub postscript_name: String,
    pub flags: u32,
    pub size_pt: f64,
    pub is_monospace: bool,
}

impl FontInfo {
    pub fn new(postscript_name: impl Into<String>, flags: u32, size_pt: f64) -> Self {
        let postscript_name = postscript_name.into();
        let is_monospace = detect_monospace(&postscript_name, flags);
        FontInfo {
            postscript_name,
            flags,
            size_pt,
            is_monospace,
        }
    }

    /// Whether the stored classification agrees with [`detect_monospace`].
    pub fn is_consistent(&self) -> bool {
        self.is_monospace == detect_monospace(&self.postscript_name, self.flags)
    }
}
