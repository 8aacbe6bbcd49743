//! The curated link set: typed, provenance-tagged links between mention
//! locations and code entities.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::str::FromStr;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::digest;
use crate::linker::LinkerParams;

/// Name of the closed label vocabulary carried in exported files.
pub const LABEL_VOCABULARY: &str = "core-v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Defines,
    Implements,
    Uses,
    Configures,
    Evaluates,
    Mentions,
}

impl Label {
    pub const ALL: [Label; 6] = [
        Label::Defines,
        Label::Implements,
        Label::Uses,
        Label::Configures,
        Label::Evaluates,
        Label::Mentions,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Defines => "defines",
            Label::Implements => "implements",
            Label::Uses => "uses",
            Label::Configures => "configures",
            Label::Evaluates => "evaluates",
            Label::Mentions => "mentions",
        }
    }
}

impl FromStr for Label {
    type Err = LinkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Label::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| LinkError::InvalidLabel(s.into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Auto,
    Manual,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::Auto => "auto",
            Origin::Manual => "manual",
        }
    }
}

impl FromStr for Origin {
    type Err = LinkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Origin::Auto),
            "manual" => Ok(Origin::Manual),
            other => Err(LinkError::InvalidLink(format!("unknown origin {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinkError {
    #[error("a link with the same location, target and origin already exists")]
    DuplicateLink,
    #[error("label {0:?} is not in the vocabulary")]
    InvalidLabel(String),
    #[error("invalid link: {0}")]
    InvalidLink(String),
    #[error("link sets belong to different documents or code trees")]
    DigestMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Link {
    pub link_id: String,
    pub page: u32,
    pub line: u32,
    pub char_start: u32,
    pub char_end: u32,
    pub snippet: String,
    pub target_qname: String,
    pub target_file: String,
    pub target_line: u32,
    pub label: Label,
    pub origin: Origin,
    pub score: u32,
}

/// Identity of a link within a set: location plus target.
pub type LinkKey<'a> = (u32, u32, u32, u32, &'a str);

/// Deterministic lowercase-hex id for a link location and target.
pub fn link_id(page: u32, line: u32, char_start: u32, char_end: u32, target_qname: &str) -> String {
    let key = format!("{page}:{line}:{char_start}:{char_end}:{target_qname}");
    let mut hex = digest::sha256_hex(key.as_bytes());
    hex.truncate(16);
    hex
}

/// Characters XML 1.0 can carry.
pub fn is_xml_char(c: char) -> bool {
    matches!(c, '\t' | '\n' | '\r') || (c >= ' ' && !matches!(c, '\u{FFFE}' | '\u{FFFF}'))
}

impl Link {
    pub fn key(&self) -> LinkKey<'_> {
        (self.page, self.line, self.char_start, self.char_end, &self.target_qname)
    }

    fn order(&self, other: &Link) -> Ordering {
        (self.page, self.line, self.char_start, &self.target_qname, self.char_end).cmp(&(
            other.page,
            other.line,
            other.char_start,
            &other.target_qname,
            other.char_end,
        ))
    }

    pub fn validate(&self) -> Result<(), LinkError> {
        let bad = |msg: &str| Err(LinkError::InvalidLink(format!("{}: {msg}", self.link_id)));
        if !digest::is_lower_hex(&self.link_id) {
            return bad("id must be lowercase hex");
        }
        if self.page == 0 || self.line == 0 {
            return bad("page and line are 1-based");
        }
        if self.char_start >= self.char_end {
            return bad("empty character range");
        }
        if self.snippet.chars().count() as u32 != self.char_end - self.char_start {
            return bad("snippet length differs from character range");
        }
        if self.target_qname.is_empty() {
            return bad("missing target");
        }
        if self.target_line == 0 {
            return bad("target line is 1-based");
        }
        if self.origin == Origin::Manual && self.score != 0 {
            return bad("manual links carry score 0");
        }
        let texts = [&self.snippet, &self.target_qname, &self.target_file];
        if texts.iter().any(|t| !t.chars().all(is_xml_char)) {
            return bad("text contains characters XML cannot carry");
        }
        Ok(())
    }
}

/// What [`LinkSet::add_link`] did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AddOutcome {
    Inserted,
    /// A manual link took the place of an auto link.
    Replaced,
    /// An auto link arrived where a manual link already stands.
    Kept,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkSet {
    pub document_digest: String,
    pub code_digest: String,
    /// Parameters of the linker run that produced the auto links, if recorded.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linker_params: Option<LinkerParams>,
    links: Vec<Link>,
}

impl LinkSet {
    pub fn new(document_digest: impl Into<String>, code_digest: impl Into<String>) -> Self {
        LinkSet {
            document_digest: document_digest.into(),
            code_digest: code_digest.into(),
            linker_params: None,
            links: Vec::new(),
        }
    }

    /// Builds a set from links in any order, rejecting invalid or colliding links.
    pub fn from_links(
        document_digest: impl Into<String>,
        code_digest: impl Into<String>,
        links: impl IntoIterator<Item = Link>,
    ) -> Result<Self, LinkError> {
        let mut set = LinkSet::new(document_digest, code_digest);
        for link in links {
            link.validate()?;
            match set.position(&link) {
                Ok(_) => return Err(LinkError::DuplicateLink),
                Err(at) => set.links.insert(at, link),
            }
        }
        set.check_ids()?;
        Ok(set)
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn get(&self, link_id: &str) -> Option<&Link> {
        self.links.iter().find(|l| l.link_id == link_id)
    }

    fn position(&self, link: &Link) -> Result<usize, usize> {
        self.links.binary_search_by(|probe| probe.order(link))
    }

    fn check_ids(&self) -> Result<(), LinkError> {
        let mut ids: Vec<&str> = self.links.iter().map(|l| l.link_id.as_str()).collect();
        ids.sort_unstable();
        match ids.windows(2).find(|w| w[0] == w[1]) {
            Some(w) => Err(LinkError::InvalidLink(format!("duplicate link id {}", w[0]))),
            None => Ok(()),
        }
    }

    /// Inserts a link in order. A manual link replaces an auto link at the
    /// same location and target; an auto link never displaces a manual one;
    /// a second link with the same origin is a [`LinkError::DuplicateLink`].
    pub fn add_link(&mut self, link: Link) -> Result<AddOutcome, LinkError> {
        link.validate()?;
        match self.position(&link) {
            Err(at) => {
                if self.get(&link.link_id).is_some() {
                    return Err(LinkError::InvalidLink(format!("duplicate link id {}", link.link_id)));
                }
                self.links.insert(at, link);
                Ok(AddOutcome::Inserted)
            }
            Ok(at) => {
                let existing = &self.links[at];
                match (existing.origin, link.origin) {
                    (Origin::Auto, Origin::Manual) => {
                        self.links[at] = link;
                        Ok(AddOutcome::Replaced)
                    }
                    (Origin::Manual, Origin::Auto) => Ok(AddOutcome::Kept),
                    _ => Err(LinkError::DuplicateLink),
                }
            }
        }
    }

    pub fn remove(&mut self, link_id: &str) -> Option<Link> {
        let at = self.links.iter().position(|l| l.link_id == link_id)?;
        Some(self.links.remove(at))
    }

    /// Links with the given origin, as a set bound to the same digests.
    pub fn with_origin(&self, origin: Origin) -> LinkSet {
        LinkSet {
            document_digest: self.document_digest.clone(),
            code_digest: self.code_digest.clone(),
            linker_params: self.linker_params.clone(),
            links: self.links.iter().filter(|l| l.origin == origin).cloned().collect(),
        }
    }

    /// Checks every set invariant; used after parsing untrusted input.
    pub fn validate(&self) -> Result<(), LinkError> {
        if !digest::is_digest(&self.document_digest) || !digest::is_digest(&self.code_digest) {
            return Err(LinkError::InvalidLink("digests must be 64 lowercase hex characters".into()));
        }
        for link in &self.links {
            link.validate()?;
        }
        for w in self.links.windows(2) {
            match w[0].order(&w[1]) {
                Ordering::Less => {}
                Ordering::Equal => return Err(LinkError::DuplicateLink),
                Ordering::Greater => return Err(LinkError::InvalidLink("links out of order".into())),
            }
        }
        self.check_ids()
    }
}

/// Union of two sets; on a location/target collision the manual set's link wins.
pub fn merge(auto: &LinkSet, manual: &LinkSet) -> Result<LinkSet, LinkError> {
    if auto.document_digest != manual.document_digest || auto.code_digest != manual.code_digest {
        return Err(LinkError::DigestMismatch);
    }
    let mut out = auto.clone();
    if out.linker_params.is_none() {
        out.linker_params = manual.linker_params.clone();
    }
    for link in &manual.links {
        match out.position(link) {
            Ok(at) => out.links[at] = link.clone(),
            Err(at) => out.links.insert(at, link.clone()),
        }
    }
    Ok(out)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    pub(crate) fn link(page: u32, line: u32, start: u32, snippet: &str, target: &str, origin: Origin) -> Link {
        let end = start + snippet.chars().count() as u32;
        Link {
            link_id: link_id(page, line, start, end, target),
            page,
            line,
            char_start: start,
            char_end: end,
            snippet: snippet.to_string(),
            target_qname: target.to_string(),
            target_file: "a/A.java".to_string(),
            target_line: 3,
            label: Label::Mentions,
            origin,
            score: 0,
        }
    }

    fn d(c: &str) -> String {
        digest::sha256_hex(c.as_bytes())
    }

    #[test]
    fn labels_parse() {
        assert_eq!("uses".parse::<Label>(), Ok(Label::Uses));
        assert_eq!(
            "unknownlabel".parse::<Label>(),
            Err(LinkError::InvalidLabel("unknownlabel".into()))
        );
        for l in Label::ALL {
            assert_eq!(l.as_str().parse::<Label>(), Ok(l));
        }
    }

    #[test]
    fn add_keeps_order_and_precedence() {
        let mut set = LinkSet::new(d("doc"), d("code"));
        assert_eq!(set.add_link(link(2, 1, 0, "b", "x.B", Origin::Auto)), Ok(AddOutcome::Inserted));
        assert_eq!(set.add_link(link(1, 5, 4, "a", "x.A", Origin::Auto)), Ok(AddOutcome::Inserted));
        assert_eq!(set.len(), 2);
        assert_eq!(set.links()[0].page, 1);

        let mut manual = link(1, 5, 4, "a", "x.A", Origin::Manual);
        manual.label = Label::Implements;
        assert_eq!(set.add_link(manual.clone()), Ok(AddOutcome::Replaced));
        assert_eq!(set.len(), 2);
        assert_eq!(set.links()[0].origin, Origin::Manual);

        assert_eq!(set.add_link(manual), Err(LinkError::DuplicateLink));
        assert_eq!(set.add_link(link(1, 5, 4, "a", "x.A", Origin::Auto)), Ok(AddOutcome::Kept));
        assert_eq!(set.links()[0].origin, Origin::Manual);
        set.validate().unwrap();
    }

    #[test]
    fn rejects_invalid_links() {
        let mut set = LinkSet::new(d("doc"), d("code"));
        let mut l = link(1, 1, 0, "abc", "x.A", Origin::Manual);
        l.score = 3;
        assert!(matches!(set.add_link(l), Err(LinkError::InvalidLink(_))));
        let mut l = link(1, 1, 0, "abc", "x.A", Origin::Auto);
        l.char_end = 10;
        assert!(set.add_link(l).is_err());
        let mut l = link(1, 1, 0, "abc", "x.A", Origin::Auto);
        l.snippet = "a\u{1}c".into();
        assert!(set.add_link(l).is_err());
        assert!(set.is_empty());
    }

    #[test]
    fn merge_cases() {
        let (doc, code) = (d("doc"), d("code"));
        let l1 = link(1, 1, 0, "one", "x.One", Origin::Auto);
        let l2 = link(1, 2, 0, "two", "x.Two", Origin::Auto);
        let auto = LinkSet::from_links(&*doc, &*code, vec![l1.clone(), l2.clone()]).unwrap();

        let mut l2m = link(1, 2, 0, "two", "x.Two", Origin::Manual);
        l2m.label = Label::Defines;
        let manual = LinkSet::from_links(&*doc, &*code, vec![l2m.clone()]).unwrap();
        let merged = merge(&auto, &manual).unwrap();
        assert_eq!(merged.links(), [l1.clone(), l2m]);

        let empty = LinkSet::new(&*doc, &*code);
        assert_eq!(merge(&auto, &empty).unwrap(), auto);

        let three = LinkSet::from_links(&*doc, &*code, vec![
            link(3, 1, 0, "a", "p.A", Origin::Auto),
            link(3, 2, 0, "b", "p.B", Origin::Auto),
            link(3, 3, 0, "c", "p.C", Origin::Auto),
        ])
        .unwrap();
        let two = LinkSet::from_links(&*doc, &*code, vec![
            link(4, 1, 0, "d", "p.D", Origin::Manual),
            link(4, 2, 0, "e", "p.E", Origin::Manual),
        ])
        .unwrap();
        assert_eq!(merge(&three, &two).unwrap().len(), 5);

        let other = LinkSet::new(d("other"), &*code);
        assert_eq!(merge(&auto, &other), Err(LinkError::DigestMismatch));
    }

    #[test]
    fn remove_by_id() {
        let l = link(1, 1, 0, "one", "x.One", Origin::Manual);
        let id = l.link_id.clone();
        let mut set = LinkSet::from_links(d("a"), d("b"), vec![l]).unwrap();
        assert!(set.remove("ffff").is_none());
        assert_eq!(set.remove(&id).unwrap().link_id, id);
        assert!(set.is_empty());
    }
}
