//! Scoring the linker against a corpus of papers with gold links.
//!
//! A corpus is a directory with one subdirectory per document, each holding
//! `paper.pdf`, `repo/` and `gold.xml`.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use scisoftx_core::eval::{match_links, DocumentScore, EvalReport, SkippedDocument};
use scisoftx_core::{LinkerParams, Profile};

use crate::extract::extract_spans;
use crate::formats::import_xml;
use crate::repo::build_index;

pub const PAPER_FILE: &str = "paper.pdf";
pub const REPO_DIR: &str = "repo";
pub const GOLD_FILE: &str = "gold.xml";
pub const REPORT_FILE: &str = "report.json";

/// Subdirectories of `corpus` that contain a paper, in name order.
pub fn corpus_documents(corpus: &Path) -> io::Result<Vec<String>> {
    let mut names = Vec::new();
    for entry in fs::read_dir(corpus)? {
        let entry = entry?;
        if entry.file_type()?.is_dir() && entry.path().join(PAPER_FILE).is_file() {
            names.push(entry.file_name().to_string_lossy().into_owned());
        }
    }
    names.sort();
    Ok(names)
}

pub fn evaluate_document(dir: &Path, params: &LinkerParams) -> Result<(u64, u64, u64), String> {
    let pdf = fs::read(dir.join(PAPER_FILE)).map_err(|e| format!("reading {PAPER_FILE}: {e}"))?;
    let doc = extract_spans(&pdf).map_err(|e| e.to_string())?;
    let index = build_index(&dir.join(REPO_DIR), &Profile::ALL.into_iter().collect()).map_err(|e| e.to_string())?;
    let gold_bytes = fs::read(dir.join(GOLD_FILE)).map_err(|e| format!("reading {GOLD_FILE}: {e}"))?;
    let gold = import_xml(&gold_bytes).map_err(|e| format!("{GOLD_FILE}: {e}"))?;
    let predicted = scisoftx_core::linker::link_document(&doc, &index, params);
    let counts = match_links(&predicted, &gold).map_err(|e| format!("{GOLD_FILE}: {e}"))?;
    Ok((counts.tp, counts.fp, counts.fn_))
}

/// Evaluates every document. A document that cannot be read is recorded as
/// skipped and the run continues.
pub fn evaluate_corpus(corpus: &Path, params: &LinkerParams) -> io::Result<EvalReport> {
    let mut scores = Vec::new();
    let mut skipped = Vec::new();
    for name in corpus_documents(corpus)? {
        match evaluate_document(&corpus.join(&name), params) {
            Ok((tp, fp, fn_)) => scores.push(DocumentScore { document: name, tp, fp, fn_ }),
            Err(error) => skipped.push(SkippedDocument { document: name, error }),
        }
    }
    Ok(EvalReport::from_documents(scores, skipped))
}

/// Aligned plain-text table with one row per document and a TOTAL row.
pub fn format_table(report: &EvalReport) -> String {
    let mut rows = vec![[
        "document".to_string(),
        "tp".into(),
        "fp".into(),
        "fn".into(),
        "P".into(),
        "R".into(),
        "F1".into(),
    ]];
    let row = |name: &str, c: scisoftx_core::eval::Counts| {
        [
            name.to_string(),
            c.tp.to_string(),
            c.fp.to_string(),
            c.fn_.to_string(),
            format!("{:.3}", c.precision()),
            format!("{:.3}", c.recall()),
            format!("{:.3}", c.f1()),
        ]
    };
    for d in &report.per_document {
        rows.push(row(&d.document, d.counts()));
    }
    rows.push(row("TOTAL", report.counts()));
    let mut widths = [0usize; 7];
    for r in &rows {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    for r in &rows {
        let mut line = String::new();
        for (i, cell) in r.iter().enumerate() {
            if i == 0 {
                let _ = write!(line, "{cell:<w$}", w = widths[0]);
            } else {
                let _ = write!(line, "  {cell:>w$}", w = widths[i]);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    for s in &report.skipped {
        let _ = writeln!(out, "skipped {}: {}", s.document, s.error);
    }
    out
}
