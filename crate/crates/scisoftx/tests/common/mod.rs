#![allow(dead_code)]

pub mod strategies;

use std::path::{Path, PathBuf};

use serde_json::Value;

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn object<'a>(v: &'a Value, what: &str) -> Result<&'a serde_json::Map<String, Value>, String> {
    v.as_object().ok_or_else(|| format!("{what} is not an object"))
}

/// Checks that `v` has exactly the `required` keys plus any of `optional`.
fn keys(v: &Value, what: &str, required: &[&str], optional: &[&str]) -> Result<(), String> {
    let obj = object(v, what)?;
    for k in required {
        if !obj.contains_key(*k) {
            return Err(format!("{what} lacks {k}"));
        }
    }
    for k in obj.keys() {
        if !required.contains(&k.as_str()) && !optional.contains(&k.as_str()) {
            return Err(format!("{what} has unexpected key {k}"));
        }
    }
    Ok(())
}

fn uint(v: &Value, what: &str) -> Result<u64, String> {
    v.as_u64().ok_or_else(|| format!("{what} is not a non-negative integer"))
}

fn string<'a>(v: &'a Value, what: &str) -> Result<&'a str, String> {
    v.as_str().ok_or_else(|| format!("{what} is not a string"))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>, String> {
    v.as_array().ok_or_else(|| format!("{what} is not an array"))
}

fn digest(v: &Value, what: &str) -> Result<(), String> {
    let s = string(v, what)?;
    if s.len() == 64 && s.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b)) {
        Ok(())
    } else {
        Err(format!("{what} is not a sha-256 hex digest"))
    }
}

pub fn check_document_json(v: &Value) -> Result<(), String> {
    keys(v, "document", &["page_count", "source_digest", "spans"], &[])?;
    uint(&v["page_count"], "page_count")?;
    digest(&v["source_digest"], "source_digest")?;
    for s in array(&v["spans"], "spans")? {
        keys(
            s,
            "span",
            &["span_id", "page", "line", "char_start", "char_end", "text", "bbox", "font"],
            &[],
        )?;
        for k in ["span_id", "page", "line", "char_start", "char_end"] {
            uint(&s[k], k)?;
        }
        string(&s["text"], "text")?;
        let bbox = array(&s["bbox"], "bbox")?;
        if bbox.len() != 4 || !bbox.iter().all(Value::is_number) {
            return Err("bbox is not four numbers".into());
        }
        let f = &s["font"];
        keys(f, "font", &["postscript_name", "flags", "size_pt", "is_monospace"], &[])?;
        string(&f["postscript_name"], "postscript_name")?;
        uint(&f["flags"], "flags")?;
        if !f["size_pt"].is_number() || !f["is_monospace"].is_boolean() {
            return Err("font size_pt or is_monospace has the wrong type".into());
        }
    }
    Ok(())
}

pub const ENTITY_KINDS: [&str; 7] = ["package", "file", "type_def", "function", "field", "variable", "parameter"];

pub fn check_index_json(v: &Value) -> Result<(), String> {
    keys(v, "index", &["root_dir", "source_digest", "entities"], &["diagnostics"])?;
    string(&v["root_dir"], "root_dir")?;
    digest(&v["source_digest"], "source_digest")?;
    for e in array(&v["entities"], "entities")? {
        keys(
            e,
            "entity",
            &["entity_id", "kind", "name", "qualified_name", "file_path", "line_start", "line_end", "parent_id"],
            &[],
        )?;
        uint(&e["entity_id"], "entity_id")?;
        if !ENTITY_KINDS.contains(&string(&e["kind"], "kind")?) {
            return Err(format!("unknown entity kind {}", e["kind"]));
        }
        for k in ["name", "qualified_name", "file_path"] {
            string(&e[k], k)?;
        }
        uint(&e["line_start"], "line_start")?;
        uint(&e["line_end"], "line_end")?;
        if !(e["parent_id"].is_null() || e["parent_id"].is_u64()) {
            return Err("parent_id is neither null nor an id".into());
        }
    }
    Ok(())
}

pub fn check_graph_json(v: &Value) -> Result<(), String> {
    keys(v, "graph", &["level", "nodes", "edges"], &[])?;
    if !["file", "package"].contains(&string(&v["level"], "level")?) {
        return Err("level is not file or package".into());
    }
    for n in array(&v["nodes"], "nodes")? {
        keys(n, "node", &["node_id", "kind", "label"], &[])?;
        if !["mention", "page", "file", "package"].contains(&string(&n["kind"], "kind")?) {
            return Err(format!("unknown node kind {}", n["kind"]));
        }
        string(&n["node_id"], "node_id")?;
        string(&n["label"], "label")?;
    }
    for e in array(&v["edges"], "edges")? {
        keys(e, "edge", &["source", "target", "weight"], &[])?;
        string(&e["source"], "source")?;
        string(&e["target"], "target")?;
        if uint(&e["weight"], "weight")? == 0 {
            return Err("edge weight is zero".into());
        }
    }
    Ok(())
}

pub fn check_report_json(v: &Value) -> Result<(), String> {
    keys(
        v,
        "report",
        &["tp", "fp", "fn", "precision", "recall", "f1", "per_document"],
        &["skipped"],
    )?;
    for k in ["tp", "fp", "fn"] {
        uint(&v[k], k)?;
    }
    for k in ["precision", "recall", "f1"] {
        let x = v[k].as_f64().ok_or_else(|| format!("{k} is not a number"))?;
        if !(0.0..=1.0).contains(&x) {
            return Err(format!("{k} is outside [0, 1]"));
        }
    }
    for d in array(&v["per_document"], "per_document")? {
        keys(d, "document score", &["document", "tp", "fp", "fn"], &[])?;
    }
    Ok(())
}
