//! The positioned, font-attributed text model of one PDF.

use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::font::FontInfo;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpanId(pub u32);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextSpan {
    pub span_id: SpanId,
    pub page: u32,
    pub line: u32,
    /// Half-open character range into the line's text.
    pub char_start: u32,
    pub char_end: u32,
    pub text: String,
    /// `[x0, y0, x1, y1]` in PDF user space.
    pub bbox: [f64; 4],
    pub font: FontInfo,
}

impl TextSpan {
    pub fn char_len(&self) -> u32 {
        self.char_end - self.char_start
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("document has no pages")]
    NoPages,
    #[error("source digest is not 64 lowercase hex characters")]
    BadDigest,
    #[error("span {0} lies outside the page range")]
    PageOutOfRange(u32),
    #[error("span {0} has zero page or line")]
    ZeroPosition(u32),
    #[error("span {0}: character range does not match its text")]
    BadRange(u32),
    #[error("span {0}: inverted bounding box")]
    BadBbox(u32),
    #[error("span {0}: font classification disagrees with detect_monospace")]
    InconsistentFont(u32),
    #[error("span {0}: non-positive font size")]
    BadFontSize(u32),
    #[error("span {0} is out of reading order or overlaps its predecessor")]
    Order(u32),
    #[error("duplicate span id {0}")]
    DuplicateId(u32),
}

/// Extracted document: spans in reading order (page, line, char_start).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentModel {
    pub page_count: u32,
    pub source_digest: String,
    pub spans: Vec<TextSpan>,
}

impl DocumentModel {
    /// Checks every type invariant of the model and its spans.
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.page_count == 0 {
            return Err(ModelError::NoPages);
        }
        if !crate::digest::is_digest(&self.source_digest) {
            return Err(ModelError::BadDigest);
        }
        let mut ids: Vec<u32> = Vec::with_capacity(self.spans.len());
        let mut prev: Option<&TextSpan> = None;
        for span in &self.spans {
            let id = span.span_id.0;
            if span.page == 0 || span.line == 0 {
                return Err(ModelError::ZeroPosition(id));
            }
            if span.page > self.page_count {
                return Err(ModelError::PageOutOfRange(id));
            }
            if span.char_start >= span.char_end
                || span.text.chars().count() as u32 != span.char_end - span.char_start
            {
                return Err(ModelError::BadRange(id));
            }
            let [x0, y0, x1, y1] = span.bbox;
            if !(x0 <= x1 && y0 <= y1) {
                return Err(ModelError::BadBbox(id));
            }
            if !span.font.is_consistent() {
                return Err(ModelError::InconsistentFont(id));
            }
            if !(span.font.size_pt > 0.0) {
                return Err(ModelError::BadFontSize(id));
            }
            if let Some(p) = prev {
                let ordered = (p.page, p.line, p.char_start) < (span.page, span.line, span.char_start);
                let overlaps = (p.page, p.line) == (span.page, span.line) && span.char_start < p.char_end;
                if !ordered || overlaps {
                    return Err(ModelError::Order(id));
                }
            }
            ids.push(id);
            prev = Some(span);
        }
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(ModelError::DuplicateId(w[0]));
        }
        Ok(())
    }

    pub fn span(&self, id: SpanId) -> Option<&TextSpan> {
        self.spans.iter().find(|s| s.span_id == id)
    }

    /// Spans grouped by `(page, line)`, in reading order.
    pub fn lines(&self) -> impl Iterator<Item = &[TextSpan]> {
        self.spans.chunk_by(|a, b| (a.page, a.line) == (b.page, b.line))
    }

    /// The visible text of one line: spans placed at their offsets, gaps
    /// filled with spaces.
    pub fn line_text(&self, page: u32, line: u32) -> Option<String> {
        let spans = self.lines().find(|l| (l[0].page, l[0].line) == (page, line))?;
        Some(assemble_line(spans))
    }

    /// Whether `[char_start, char_end)` on `(page, line)` lies within the
    /// extent covered by that line's spans.
    pub fn covers(&self, page: u32, line: u32, char_start: u32, char_end: u32) -> bool {
        self.lines()
            .find(|l| (l[0].page, l[0].line) == (page, line))
            .map(|l| {
                let first = l[0].char_start;
                let last = l[l.len() - 1].char_end;
                first <= char_start && char_start < char_end && char_end <= last
            })
            .unwrap_or(false)
    }
}

pub(crate) fn assemble_line(spans: &[TextSpan]) -> String {
    let mut out = String::new();
    let mut pos = 0u32;
    for span in spans {
        while pos < span.char_start {
            out.push(' ');
            pos += 1;
        }
        out.push_str(&span.text);
        pos = span.char_end;
    }
    out
}
