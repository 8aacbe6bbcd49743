//! The link interchange file.
//!
//! ```text
//! <?xml version="1.0" encoding="UTF-8"?>
//! <scisoftx-links version="1" document-digest="…" code-digest="…" label-vocabulary="core-v1">
//!   <linker-params context-window="10" block-min-lines="3" block-monospace-ratio="0.8" min-token-len="2" stoplist="…"/>
//!   <link id="…" page="…" line="…" char-start="…" char-end="…" label="…" origin="…" score="…">
//!     <snippet>…</snippet>
//!     <target qname="…" file="…" line="…"/>
//!   </link>
//! </scisoftx-links>
//! ```
//!
//! The `linker-params` line is present only when the set records the
//! parameters of the run that produced it.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use quick_xml::events::{BytesStart, Event};
use quick_xml::escape::resolve_predefined_entity;
use quick_xml::{Reader, XmlVersion};
use scisoftx_core::links::LABEL_VOCABULARY;
use scisoftx_core::{Label, Link, LinkError, LinkSet, LinkerParams, Origin};
use thiserror::Error;

pub const SCHEMA_VERSION: &str = "1";
const ROOT: &str = "scisoftx-links";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum XmlError {
    #[error("line {line}: {message}")]
    SchemaViolation { line: usize, message: String },
    #[error("unsupported link file version {0:?} (expected {SCHEMA_VERSION})")]
    UnsupportedVersion(String),
    #[error("label {0:?} is not in the vocabulary")]
    InvalidLabel(String),
}

fn escape_into(out: &mut String, s: &str, attribute: bool) {
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' if attribute => out.push_str("&quot;"),
            '\t' if attribute => out.push_str("&#9;"),
            '\n' if attribute => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            c => out.push(c),
        }
    }
}

fn attr(out: &mut String, name: &str, value: impl std::fmt::Display) {
    let value = value.to_string();
    let _ = write!(out, " {name}=\"");
    escape_into(out, &value, true);
    out.push('"');
}

/// Canonical, byte-for-byte deterministic serialization.
pub fn export_xml(set: &LinkSet) -> Vec<u8> {
    let mut out = String::with_capacity(256 + set.len() * 256);
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push('<');
    out.push_str(ROOT);
    attr(&mut out, "version", SCHEMA_VERSION);
    attr(&mut out, "document-digest", &set.document_digest);
    attr(&mut out, "code-digest", &set.code_digest);
    attr(&mut out, "label-vocabulary", LABEL_VOCABULARY);
    out.push_str(">\n");
    if let Some(p) = &set.linker_params {
        out.push_str("  <linker-params");
        attr(&mut out, "context-window", p.context_window);
        attr(&mut out, "block-min-lines", p.block_min_lines);
        attr(&mut out, "block-monospace-ratio", p.block_monospace_ratio);
        attr(&mut out, "min-token-len", p.min_token_len);
        attr(&mut out, "stoplist", p.stoplist.join(" "));
        out.push_str("/>\n");
    }
    for l in set.links() {
        out.push_str("  <link");
        attr(&mut out, "id", &l.link_id);
        attr(&mut out, "page", l.page);
        attr(&mut out, "line", l.line);
        attr(&mut out, "char-start", l.char_start);
        attr(&mut out, "char-end", l.char_end);
        attr(&mut out, "label", l.label.as_str());
        attr(&mut out, "origin", l.origin.as_str());
        attr(&mut out, "score", l.score);
        out.push_str(">\n    <snippet>");
        escape_into(&mut out, &l.snippet, false);
        out.push_str("</snippet>\n    <target");
        attr(&mut out, "qname", &l.target_qname);
        attr(&mut out, "file", &l.target_file);
        attr(&mut out, "line", l.target_line);
        out.push_str("/>\n  </link>\n");
    }
    out.push_str("</");
    out.push_str(ROOT);
    out.push_str(">\n");
    out.into_bytes()
}

struct Parser<'a> {
    input: &'a [u8],
    reader: Reader<&'a [u8]>,
}

type Attrs = BTreeMap<String, String>;

impl<'a> Parser<'a> {
    fn line_at(&self, pos: u64) -> usize {
        let end = (pos as usize).min(self.input.len());
        1 + self.input[..end].iter().filter(|&&b| b == b'\n').count()
    }

    fn line(&self) -> usize {
        self.line_at(self.reader.buffer_position())
    }

    fn violation(&self, message: impl Into<String>) -> XmlError {
        XmlError::SchemaViolation {
            line: self.line(),
            message: message.into(),
        }
    }

    fn next(&mut self) -> Result<Event<'a>, XmlError> {
        loop {
            match self.reader.read_event() {
                Ok(Event::Comment(_) | Event::PI(_) | Event::Decl(_) | Event::DocType(_)) => continue,
                Ok(Event::Text(t)) if t.xml10_content().chars().all(char::is_whitespace) => continue,
                Ok(ev) => return Ok(ev),
                Err(e) => {
                    let line = self.line_at(self.reader.error_position());
                    return Err(XmlError::SchemaViolation { line, message: e.to_string() });
                }
            }
        }
    }

    fn attrs(&self, el: &BytesStart<'_>, allowed: &[&str]) -> Result<Attrs, XmlError> {
        let mut out = Attrs::new();
        for a in el.attributes() {
            let a = a.map_err(|e| self.violation(e.to_string()))?;
            let key = a.key.as_ref().to_string();
            if !allowed.contains(&key.as_str()) {
                return Err(self.violation(format!(
                    "unexpected attribute {key:?} on <{}>",
                    AsRef::<str>::as_ref(&el.name()).to_string()
                )));
            }
            let value = a
                .normalized_value(XmlVersion::Implicit1_0)
                .map_err(|e| self.violation(e.to_string()))?
                .into_owned();
            if out.insert(key.clone(), value).is_some() {
                return Err(self.violation(format!("duplicate attribute {key:?}")));
            }
        }
        Ok(out)
    }

    fn take(&self, attrs: &mut Attrs, element: &str, key: &str) -> Result<String, XmlError> {
        attrs
            .remove(key)
            .ok_or_else(|| self.violation(format!("<{element}> is missing attribute {key:?}")))
    }

    fn number<T: FromStr>(&self, attrs: &mut Attrs, element: &str, key: &str) -> Result<T, XmlError> {
        let raw = self.take(attrs, element, key)?;
        raw.parse()
            .map_err(|_| self.violation(format!("<{element}> attribute {key:?}: {raw:?} is not a valid number")))
    }

    fn root(&mut self) -> Result<LinkSet, XmlError> {
        let root = match self.next()? {
            Event::Start(el) if el.name().as_ref() == ROOT => el,
            Event::Eof => return Err(self.violation("empty document")),
            _ => return Err(self.violation(format!("expected <{ROOT}> root element"))),
        };
        let mut attrs = self.attrs(&root, &["version", "document-digest", "code-digest", "label-vocabulary"])?;
        let version = self.take(&mut attrs, ROOT, "version")?;
        if version != SCHEMA_VERSION {
            return Err(XmlError::UnsupportedVersion(version));
        }
        let vocabulary = self.take(&mut attrs, ROOT, "label-vocabulary")?;
        if vocabulary != LABEL_VOCABULARY {
            return Err(self.violation(format!("unsupported label vocabulary {vocabulary:?}")));
        }
        let document_digest = self.take(&mut attrs, ROOT, "document-digest")?;
        let code_digest = self.take(&mut attrs, ROOT, "code-digest")?;
        for (name, d) in [("document-digest", &document_digest), ("code-digest", &code_digest)] {
            if !scisoftx_core::digest::is_digest(d) {
                return Err(self.violation(format!("{name} must be 64 lowercase hex characters")));
            }
        }

        let mut params = None;
        let mut links = Vec::new();
        loop {
            match self.next()? {
                Event::Empty(el) if el.name().as_ref() == "linker-params" => {
                    if params.is_some() || !links.is_empty() {
                        return Err(self.violation("<linker-params> must appear once, before any <link>"));
                    }
                    params = Some(self.params(&el)?);
                }
                Event::Start(el) if el.name().as_ref() == "link" => {
                    let tag_start = self.reader.buffer_position().saturating_sub(el.len() as u64 + 2);
                    let line = self.line_at(tag_start);
                    links.push((line, self.link(&el)?));
                }
                Event::End(el) if el.name().as_ref() == ROOT => break,
                Event::Eof => return Err(self.violation(format!("unexpected end of file inside <{ROOT}>"))),
                _ => return Err(self.violation("expected <link> or </scisoftx-links>")),
            }
        }
        match self.next()? {
            Event::Eof => {}
            _ => return Err(self.violation("content after the root element")),
        }

        let mut set = LinkSet::new(document_digest, code_digest);
        set.linker_params = params;
        for (line, link) in links {
            match set.add_link(link) {
                Ok(scisoftx_core::links::AddOutcome::Inserted) => {}
                Ok(_) | Err(LinkError::DuplicateLink) => {
                    return Err(XmlError::SchemaViolation {
                        line,
                        message: "duplicate link location and target".into(),
                    })
                }
                Err(LinkError::InvalidLabel(l)) => return Err(XmlError::InvalidLabel(l)),
                Err(e) => return Err(XmlError::SchemaViolation { line, message: e.to_string() }),
            }
        }
        Ok(set)
    }

    fn params(&self, el: &BytesStart<'_>) -> Result<LinkerParams, XmlError> {
        const E: &str = "linker-params";
        let mut a = self.attrs(
            el,
            &["context-window", "block-min-lines", "block-monospace-ratio", "min-token-len", "stoplist"],
        )?;
        let stoplist = self.take(&mut a, E, "stoplist")?;
        let ratio: f64 = self.number(&mut a, E, "block-monospace-ratio")?;
        if !ratio.is_finite() {
            return Err(self.violation("block-monospace-ratio must be finite"));
        }
        Ok(LinkerParams {
            context_window: self.number(&mut a, E, "context-window")?,
            block_min_lines: self.number(&mut a, E, "block-min-lines")?,
            block_monospace_ratio: ratio,
            min_token_len: self.number(&mut a, E, "min-token-len")?,
            stoplist: stoplist.split_whitespace().map(String::from).collect(),
        })
    }

    fn link(&mut self, el: &BytesStart<'_>) -> Result<Link, XmlError> {
        const E: &str = "link";
        let mut a = self.attrs(
            el,
            &["id", "page", "line", "char-start", "char-end", "label", "origin", "score"],
        )?;
        let label_raw = self.take(&mut a, E, "label")?;
        let label = Label::from_str(&label_raw).map_err(|_| XmlError::InvalidLabel(label_raw))?;
        let origin_raw = self.take(&mut a, E, "origin")?;
        let origin = Origin::from_str(&origin_raw).map_err(|e| self.violation(e.to_string()))?;
        let mut link = Link {
            link_id: self.take(&mut a, E, "id")?,
            page: self.number(&mut a, E, "page")?,
            line: self.number(&mut a, E, "line")?,
            char_start: self.number(&mut a, E, "char-start")?,
            char_end: self.number(&mut a, E, "char-end")?,
            snippet: String::new(),
            target_qname: String::new(),
            target_file: String::new(),
            target_line: 0,
            label,
            origin,
            score: self.number(&mut a, E, "score")?,
        };
        let mut snippet = None;
        let mut target = None;
        loop {
            match self.next()? {
                Event::Start(s) if s.name().as_ref() == "snippet" && snippet.is_none() => {
                    self.attrs(&s, &[])?;
                    snippet = Some(self.text("snippet")?);
                }
                Event::Empty(s) if s.name().as_ref() == "snippet" && snippet.is_none() => {
                    self.attrs(&s, &[])?;
                    snippet = Some(String::new());
                }
                Event::Empty(t) if t.name().as_ref() == "target" && target.is_none() => {
                    target = Some(self.target(&t)?);
                }
                Event::Start(t) if t.name().as_ref() == "target" && target.is_none() => {
                    target = Some(self.target(&t)?);
                    match self.next()? {
                        Event::End(e) if e.name().as_ref() == "target" => {}
                        _ => return Err(self.violation("<target> must be empty")),
                    }
                }
                Event::End(e) if e.name().as_ref() == "link" => break,
                Event::Eof => return Err(self.violation("unexpected end of file inside <link>")),
                _ => return Err(self.violation("expected one <snippet> and one <target> inside <link>")),
            }
        }
        let (Some(snippet), Some((qname, file, line))) = (snippet, target) else {
            return Err(self.violation("<link> needs both <snippet> and <target>"));
        };
        link.snippet = snippet;
        link.target_qname = qname;
        link.target_file = file;
        link.target_line = line;
        link.validate().map_err(|e| match e {
            LinkError::InvalidLabel(l) => XmlError::InvalidLabel(l),
            e => self.violation(e.to_string()),
        })?;
        Ok(link)
    }

    fn target(&self, el: &BytesStart<'_>) -> Result<(String, String, u32), XmlError> {
        const E: &str = "target";
        let mut a = self.attrs(el, &["qname", "file", "line"])?;
        Ok((
            self.take(&mut a, E, "qname")?,
            self.take(&mut a, E, "file")?,
            self.number(&mut a, E, "line")?,
        ))
    }

    /// Character content up to the closing tag; whitespace is preserved.
    fn text(&mut self, element: &str) -> Result<String, XmlError> {
        let mut out = String::new();
        loop {
            let ev = self.reader.read_event().map_err(|e| XmlError::SchemaViolation {
                line: self.line_at(self.reader.error_position()),
                message: e.to_string(),
            })?;
            match ev {
                Event::Text(t) => out.push_str(&t.xml10_content()),
                Event::CData(c) => out.push_str(&c.xml10_content()),
                Event::GeneralRef(r) => {
                    let resolved = match r.resolve_char_ref() {
                        Ok(Some(c)) => Some(c.to_string()),
                        Ok(None) => resolve_predefined_entity(&r.xml10_content()).map(String::from),
                        Err(e) => return Err(self.violation(e.to_string())),
                    };
                    match resolved {
                        Some(s) => out.push_str(&s),
                        None => return Err(self.violation(format!("unknown entity &{};", r.xml10_content()))),
                    }
                }
                Event::Comment(_) => {}
                Event::End(e) if e.name().as_ref() == element => return Ok(out),
                Event::Eof => return Err(self.violation(format!("unexpected end of file inside <{element}>"))),
                _ => return Err(self.violation(format!("<{element}> may contain only text"))),
            }
        }
    }
}

/// Parses and validates a link file.
pub fn import_xml(bytes: &[u8]) -> Result<LinkSet, XmlError> {
    let mut reader = Reader::from_reader(bytes);
    reader.config_mut().trim_text(false);
    let mut parser = Parser { input: bytes, reader };
    parser.root()
}

/// Outcome of checking a link file against the loaded document and code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Binding {
    Matches,
    /// The code tree changed since the links were made; links may be stale.
    CodeChanged,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("link file belongs to document {found}, not the loaded document {expected}")]
pub struct DocumentMismatch {
    pub expected: String,
    pub found: String,
}

/// A document digest mismatch is an error; a code digest mismatch only a warning.
pub fn check_binding(set: &LinkSet, document_digest: &str, code_digest: &str) -> Result<Binding, DocumentMismatch> {
    if set.document_digest != document_digest {
        return Err(DocumentMismatch {
            expected: document_digest.into(),
            found: set.document_digest.clone(),
        });
    }
    Ok(if set.code_digest == code_digest {
        Binding::Matches
    } else {
        Binding::CodeChanged
    })
}
