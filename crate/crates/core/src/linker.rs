//! Finding code mentions in monospace text and resolving them against a
//! [`CodeIndex`].
//!
//! Candidates are maximal runs of monospace spans on one line. Each
//! candidate's tokens are looked up left to right and the first token with a
//! match produces the link. When a token matches several entities, the one
//! closest in the containment tree to the most recently linked entities wins.

use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::code::{CodeIndex, EntityId, EntityKind, IndexError};
use crate::document::{DocumentModel, SpanId, TextSpan};
use crate::links::{link_id, Label, Link, LinkSet, Origin};
use crate::tokenize::{default_stoplist, tokenize_identifier};

/// Score of an entity scored against an empty context.
pub const MAX_SCORE: u32 = i32::MAX as u32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkerParams {
    /// How many recently resolved entities form the disambiguation context.
    pub context_window: usize,
    /// Minimum number of consecutive mostly-monospace lines that make a code block.
    pub block_min_lines: u32,
    /// Share of a line's non-blank characters that must be monospace for it
    /// to count towards a code block.
    pub block_monospace_ratio: f64,
    pub min_token_len: usize,
    pub stoplist: Vec<String>,
}

impl Default for LinkerParams {
    fn default() -> Self {
        LinkerParams {
            context_window: 10,
            block_min_lines: 3,
            block_monospace_ratio: 0.8,
            min_token_len: 2,
            stoplist: default_stoplist(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MentionCandidate {
    pub mention_id: u32,
    pub span_ids: Vec<SpanId>,
    pub raw_text: String,
    pub tokens: Vec<String>,
    pub page: u32,
    pub line: u32,
    pub char_start: u32,
    pub char_end: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolvedLink {
    pub mention_id: u32,
    pub page: u32,
    pub line: u32,
    pub char_start: u32,
    pub char_end: u32,
    pub raw_text: String,
    /// The token that produced the match.
    pub token: String,
    pub entity_id: EntityId,
    /// Vicinity distance of the chosen entity; 0 when the match was unique.
    pub score: u32,
    /// Number of linkable entities the token matched.
    pub ambiguity_count: u32,
}

fn non_blank(s: &str) -> usize {
    s.chars().filter(|c| !c.is_whitespace()).count()
}

/// `(page, line)` pairs that belong to display code blocks.
fn code_block_lines(doc: &DocumentModel, params: &LinkerParams) -> Vec<(u32, u32)> {
    let mut mostly_mono: Vec<(u32, u32)> = Vec::new();
    for spans in doc.lines() {
        let total: usize = spans.iter().map(|s| non_blank(&s.text)).sum();
        let mono: usize = spans.iter().filter(|s| s.font.is_monospace).map(|s| non_blank(&s.text)).sum();
        if total > 0 && mono as f64 >= params.block_monospace_ratio * total as f64 {
            mostly_mono.push((spans[0].page, spans[0].line));
        }
    }

    let mut blocks = Vec::new();
    let mut run: Vec<(u32, u32)> = Vec::new();
    for &(page, line) in &mostly_mono {
        let continues = run.last().is_some_and(|&(p, l)| p == page && l + 1 == line);
        if !continues {
            if run.len() as u32 >= params.block_min_lines {
                blocks.append(&mut run);
            }
            run.clear();
        }
        run.push((page, line));
    }
    if run.len() as u32 >= params.block_min_lines {
        blocks.append(&mut run);
    }
    blocks
}

fn is_single_space(span: &TextSpan) -> bool {
    span.char_len() == 1 && span.text.chars().all(char::is_whitespace)
}

/// Maximal monospace runs of one line, as index ranges into `spans`.
/// Runs may bridge a single blank character, whether an unspanned gap or a
/// one-space span in another font.
fn monospace_runs(spans: &[TextSpan]) -> Vec<Vec<usize>> {
    let mut runs: Vec<Vec<usize>> = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    let mut i = 0;
    while i < spans.len() {
        let span = &spans[i];
        if span.font.is_monospace {
            let joins = current
                .last()
                .is_some_and(|&prev| span.char_start - spans[prev].char_end <= 1);
            if !joins && !current.is_empty() {
                runs.push(core::mem::take(&mut current));
            }
            current.push(i);
            i += 1;
            continue;
        }
        let bridges = !current.is_empty()
            && is_single_space(span)
            && span.char_start == spans[*current.last().expect("non-empty")].char_end
            && spans
                .get(i + 1)
                .is_some_and(|next| next.font.is_monospace && next.char_start == span.char_end);
        if !bridges && !current.is_empty() {
            runs.push(core::mem::take(&mut current));
        }
        i += 1;
    }
    if !current.is_empty() {
        runs.push(current);
    }
    runs
}

/// Code-mention candidates of a document, in reading order.
pub fn extract_candidates(doc: &DocumentModel, params: &LinkerParams) -> Vec<MentionCandidate> {
    let blocks = code_block_lines(doc, params);
    let mut out = Vec::new();
    for spans in doc.lines() {
        let (page, line) = (spans[0].page, spans[0].line);
        if blocks.binary_search(&(page, line)).is_ok() {
            continue;
        }
        let line_text: Vec<char> = crate::document::assemble_line(spans).chars().collect();
        for run in monospace_runs(spans) {
            let first = &spans[run[0]];
            let last = &spans[*run.last().expect("non-empty run")];
            let mut start = first.char_start as usize;
            let mut end = last.char_end as usize;
            while start < end && line_text[start].is_whitespace() {
                start += 1;
            }
            while end > start && line_text[end - 1].is_whitespace() {
                end -= 1;
            }
            if start == end {
                continue;
            }
            let raw_text: String = line_text[start..end].iter().collect();
            let tokens = tokenize_identifier(&raw_text, params.min_token_len, &params.stoplist);
            if tokens.is_empty() {
                continue;
            }
            out.push(MentionCandidate {
                mention_id: out.len() as u32,
                span_ids: run.iter().map(|&i| spans[i].span_id).collect(),
                raw_text,
                tokens,
                page,
                line,
                char_start: start as u32,
                char_end: end as u32,
            });
        }
    }
    out
}

/// Minimum containment distance from `entity` to any member of `context`,
/// or [`MAX_SCORE`] for an empty context.
pub fn vicinity_score(index: &CodeIndex, entity: EntityId, context: &[EntityId]) -> Result<u32, IndexError> {
    index.get(entity)?;
    let mut best = MAX_SCORE;
    for &c in context {
        best = best.min(index.containment_distance(entity, c)?);
    }
    Ok(best)
}

/// Lookup results that can be link targets. Packages have no position and
/// are never linked.
pub fn linkable_matches(index: &CodeIndex, token: &str) -> Vec<EntityId> {
    index
        .lookup(token)
        .into_iter()
        .filter(|&id| index.entity(id).is_some_and(|e| e.kind != EntityKind::Package))
        .collect()
}

/// Resolves candidates in reading order against `index`.
pub fn resolve(candidates: &[MentionCandidate], index: &CodeIndex, params: &LinkerParams) -> Vec<ResolvedLink> {
    let mut context: VecDeque<EntityId> = VecDeque::with_capacity(params.context_window);
    let mut out = Vec::new();
    for cand in candidates {
        for token in &cand.tokens {
            let matches = linkable_matches(index, token);
            let (entity_id, score) = match matches.as_slice() {
                [] => continue,
                [only] => (*only, 0),
                many => {
                    let ctx: Vec<EntityId> = context.iter().copied().collect();
                    // `matches` is already in tie-break order, so the first minimum wins.
                    let mut best = (many[0], u32::MAX);
                    for &id in many {
                        let s = vicinity_score(index, id, &ctx).expect("lookup returns indexed entities");
                        if s < best.1 {
                            best = (id, s);
                        }
                    }
                    best
                }
            };
            out.push(ResolvedLink {
                mention_id: cand.mention_id,
                page: cand.page,
                line: cand.line,
                char_start: cand.char_start,
                char_end: cand.char_end,
                raw_text: cand.raw_text.clone(),
                token: token.clone(),
                entity_id,
                score,
                ambiguity_count: matches.len() as u32,
            });
            if params.context_window > 0 {
                if context.len() == params.context_window {
                    context.pop_front();
                }
                context.push_back(entity_id);
            }
            break;
        }
    }
    out
}

/// Turns resolved links into an auto-origin link set bound to the given
/// document and code digests.
pub fn to_link_set(
    resolved: &[ResolvedLink],
    index: &CodeIndex,
    document_digest: &str,
    params: &LinkerParams,
) -> LinkSet {
    let mut set = LinkSet::new(document_digest, index.source_digest());
    set.linker_params = Some(params.clone());
    for r in resolved {
        let entity = index.entity(r.entity_id).expect("resolved against this index");
        let link = Link {
            link_id: link_id(r.page, r.line, r.char_start, r.char_end, &entity.qualified_name),
            page: r.page,
            line: r.line,
            char_start: r.char_start,
            char_end: r.char_end,
            snippet: r.raw_text.clone(),
            target_qname: entity.qualified_name.clone(),
            target_file: entity.file_path.clone(),
            target_line: entity.line_start,
            label: Label::Mentions,
            origin: Origin::Auto,
            score: r.score,
        };
        // Overloads share a qualified name, so a second mention-to-overload link is a duplicate.
        let _ = set.add_link(link);
    }
    set
}

/// Extracts candidates, resolves them, and packages the result as a link set.
pub fn link_document(doc: &DocumentModel, index: &CodeIndex, params: &LinkerParams) -> LinkSet {
    let candidates = extract_candidates(doc, params);
    let resolved = resolve(&candidates, index, params);
    to_link_set(&resolved, index, &doc.source_digest, params)
}
