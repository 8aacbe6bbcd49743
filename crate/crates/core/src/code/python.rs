//! Structural scanner for the indentation-delimited, Python-like profile.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{is_ident_char, is_ident_start, Decl, EntityKind, ParseError, ParsedFile};

pub(crate) const KEYWORDS: &[&str] = &[
    "False", "None", "True", "and", "as", "assert", "async", "await", "break", "class", "continue",
    "def", "del", "elif", "else", "except", "finally", "for", "from", "global", "if", "import", "in",
    "is", "lambda", "nonlocal", "not", "or", "pass", "raise", "return", "try", "while", "with",
    "yield", "self", "cls", "match", "case",
];

/// One logical line: strings blanked, comments dropped, embedded newlines kept
/// so that offsets map back to physical lines.
#[derive(Debug)]
struct Logical {
    indent: usize,
    start: u32,
    end: u32,
    text: String,
}

impl Logical {
    fn line_at(&self, offset: usize) -> u32 {
        self.start + self.text[..offset].matches('\n').count() as u32
    }
}

fn err(line: u32, message: &str) -> ParseError {
    ParseError {
        line,
        message: message.to_string(),
    }
}

fn logical_lines(src: &str) -> Result<Vec<Logical>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1u32;

    while i < chars.len() {
        // Indentation of a fresh physical line.
        let mut indent = 0usize;
        while let Some(&c) = chars.get(i) {
            match c {
                ' ' => indent += 1,
                '\t' => indent = (indent / 8 + 1) * 8,
                '\x0c' => indent = 0,
                _ => break,
            }
            i += 1;
        }
        match chars.get(i) {
            None => break,
            Some('\n') => {
                line += 1;
                i += 1;
                continue;
            }
            Some('\r') => {
                i += 1;
                continue;
            }
            Some('#') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            _ => {}
        }

        let start = line;
        let mut text = String::new();
        let mut depth = 0i32;
        let mut open_lines: Vec<u32> = Vec::new();
        loop {
            let Some(&c) = chars.get(i) else {
                if let Some(l) = open_lines.last() {
                    return Err(err(*l, "unclosed bracket"));
                }
                break;
            };
            match c {
                '\n' => {
                    i += 1;
                    line += 1;
                    if depth > 0 {
                        text.push('\n');
                    } else {
                        break;
                    }
                }
                '#' => {
                    while i < chars.len() && chars[i] != '\n' {
                        i += 1;
                    }
                }
                '\\' if chars.get(i + 1) == Some(&'\n') => {
                    text.push('\n');
                    i += 2;
                    line += 1;
                }
                '"' | '\'' => {
                    let triple = chars.get(i + 1) == Some(&c) && chars.get(i + 2) == Some(&c);
                    let str_line = line;
                    i += if triple { 3 } else { 1 };
                    text.push('"');
                    loop {
                        match chars.get(i) {
                            None => return Err(err(str_line, "unterminated string literal")),
                            Some('\\') => {
                                if chars.get(i + 1) == Some(&'\n') {
                                    line += 1;
                                    text.push('\n');
                                }
                                i += 2;
                            }
                            Some('\n') if !triple => return Err(err(str_line, "unterminated string literal")),
                            Some('\n') => {
                                line += 1;
                                text.push('\n');
                                i += 1;
                            }
                            Some(&q) if q == c => {
                                if !triple {
                                    i += 1;
                                    break;
                                }
                                if chars.get(i + 1) == Some(&c) && chars.get(i + 2) == Some(&c) {
                                    i += 3;
                                    break;
                                }
                                i += 1;
                            }
                            Some(_) => i += 1,
                        }
                    }
                    text.push('"');
                }
                '(' | '[' | '{' => {
                    depth += 1;
                    open_lines.push(line);
                    text.push(c);
                    i += 1;
                }
                ')' | ']' | '}' => {
                    depth -= 1;
                    open_lines.pop();
                    if depth < 0 {
                        return Err(err(line, "unmatched closing bracket"));
                    }
                    text.push(c);
                    i += 1;
                }
                '\r' => i += 1,
                _ => {
                    text.push(c);
                    i += 1;
                }
            }
        }
        let trimmed_end = text.trim_end().len();
        text.truncate(trimmed_end);
        if text.trim().is_empty() {
            continue;
        }
        let end = start + text.matches('\n').count() as u32;
        out.push(Logical { indent, start, end, text });
    }
    Ok(out)
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| is_ident_start(c) && c != '$') && chars.all(|c| is_ident_char(c) && c != '$')
}

fn leading_ident(s: &str) -> &str {
    let end = s.find(|c: char| !is_ident_char(c)).unwrap_or(s.len());
    &s[..end]
}

/// Byte offsets of top-level single `=` signs.
fn assignment_positions(text: &str) -> Vec<usize> {
    let bytes = text.as_bytes();
    let mut depth = 0i32;
    let mut out = Vec::new();
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'(' | b'[' | b'{' => depth += 1,
            b')' | b']' | b'}' => depth -= 1,
            b'=' if depth == 0 => {
                let prev = if i > 0 { bytes[i - 1] } else { b' ' };
                let next = bytes.get(i + 1).copied().unwrap_or(b' ');
                if next != b'=' && !b"=!<>:+-*/%&|^@".contains(&prev) {
                    out.push(i);
                }
            }
            _ => {}
        }
    }
    out
}

/// Splits `s` on commas at bracket depth zero, yielding `(offset, part)`.
fn split_top_level(s: &str, sep: u8) -> Vec<(usize, &str)> {
    let mut depth = 0i32;
    let mut parts = Vec::new();
    let mut start = 0;
    for (i, b) in s.bytes().enumerate() {
        match b {
            b'(' | b'[' | b'{' => depth += 1,
            b')' | b']' | b'}' => depth -= 1,
            _ if b == sep && depth == 0 => {
                parts.push((start, &s[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push((start, &s[start..]));
    parts
}

fn first_top_level(s: &str, target: u8) -> Option<usize> {
    let mut depth = 0i32;
    for (i, b) in s.bytes().enumerate() {
        match b {
            b'(' | b'[' | b'{' => depth += 1,
            b')' | b']' | b'}' => depth -= 1,
            _ if b == target && depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}

enum Target<'a> {
    Name(&'a str, usize),
    SelfAttr(&'a str, usize),
}

/// Names bound by an assignment or annotated declaration, with byte offsets.
fn assigned_targets(text: &str) -> Vec<Target<'_>> {
    let eqs = assignment_positions(text);
    let mut segments: Vec<(usize, &str)> = Vec::new();
    if eqs.is_empty() {
        // `name: Type` without a value.
        if let Some(colon) = first_top_level(text, b':') {
            if colon + 1 < text.len() {
                segments.push((0, &text[..colon]));
            }
        }
    } else {
        let mut start = 0;
        for &eq in &eqs {
            let seg = &text[start..eq];
            let seg = match first_top_level(seg, b':') {
                Some(colon) => &seg[..colon],
                None => seg,
            };
            segments.push((start, seg));
            start = eq + 1;
        }
    }

    let mut out = Vec::new();
    for (base, seg) in segments {
        for (off, part) in split_top_level(seg, b',') {
            let lead = part.len() - part.trim_start_matches(|c: char| c.is_whitespace() || c == '(' || c == '[' || c == '*').len();
            let item = part[lead..].trim_end_matches(|c: char| c.is_whitespace() || c == ')' || c == ']');
            let at = base + off + lead;
            if let Some(attr) = item.strip_prefix("self.") {
                if is_identifier(attr) {
                    out.push(Target::SelfAttr(attr, at + 5));
                }
            } else if is_identifier(item) && !KEYWORDS.contains(&item) {
                out.push(Target::Name(item, at));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Owner {
    File,
    Class(usize),
    Function(usize),
    Opaque,
}

#[derive(Debug)]
struct Scope {
    indent: usize,
    owner: Owner,
    /// Decl whose body this block is, if any.
    decl: Option<usize>,
}

struct Scanner {
    decls: Vec<Decl>,
    /// `(parent, kind, name)` of bindings already recorded.
    seen: Vec<(Option<usize>, EntityKind, String)>,
}

impl Scanner {
    fn push(&mut self, kind: EntityKind, name: &str, start: u32, end: u32, parent: Option<usize>) -> usize {
        self.decls.push(Decl {
            kind,
            name: name.to_string(),
            line_start: start,
            line_end: end,
            parent,
        });
        self.decls.len() - 1
    }

    fn bind(&mut self, kind: EntityKind, name: &str, line: u32, parent: Option<usize>) {
        let taken = self.seen.iter().any(|(p, k, n)| *p == parent && *k == kind && n == name)
            || (kind == EntityKind::Variable
                && self.decls.iter().any(|d| {
                    d.parent == parent && d.kind == EntityKind::Parameter && d.name == name
                }));
        if taken {
            return;
        }
        self.seen.push((parent, kind, name.to_string()));
        self.push(kind, name, line, line, parent);
    }

    fn params(&mut self, logical: &Logical, open: usize, func: usize) {
        let text = &logical.text;
        let mut depth = 0i32;
        let mut close = None;
        for (i, b) in text.bytes().enumerate().skip(open) {
            match b {
                b'(' | b'[' | b'{' => depth += 1,
                b')' | b']' | b'}' => {
                    depth -= 1;
                    if depth == 0 {
                        close = Some(i);
                        break;
                    }
                }
                _ => {}
            }
        }
        let Some(close) = close else { return };
        let inner = &text[open + 1..close];
        for (off, part) in split_top_level(inner, b',') {
            let lead = part.len() - part.trim_start_matches(|c: char| c.is_whitespace() || c == '*').len();
            let name = leading_ident(&part[lead..]);
            if name.is_empty() || name == "self" || name == "cls" || !is_identifier(name) {
                continue;
            }
            let line = logical.line_at(open + 1 + off + lead);
            self.push(EntityKind::Parameter, name, line, line, Some(func));
        }
    }

    fn statement(&mut self, logical: &Logical, owner: Owner) {
        let parent = match owner {
            Owner::File => None,
            Owner::Class(c) | Owner::Function(c) => Some(c),
            Owner::Opaque => return,
        };
        let text = logical.text.trim_start();
        let shift = logical.text.len() - text.len();
        if text.starts_with('@') {
            return;
        }
        for target in assigned_targets(text) {
            match target {
                Target::Name(name, off) => {
                    let line = logical.line_at(shift + off);
                    let kind = match owner {
                        Owner::Class(_) => EntityKind::Field,
                        _ => EntityKind::Variable,
                    };
                    self.bind(kind, name, line, parent);
                }
                Target::SelfAttr(name, off) => {
                    let Owner::Function(f) = owner else { continue };
                    let Some(class) = self.decls[f].parent else { continue };
                    if self.decls[class].kind != EntityKind::TypeDef {
                        continue;
                    }
                    let line = logical.line_at(shift + off);
                    self.bind(EntityKind::Field, name, line, Some(class));
                }
            }
        }
    }
}

pub(crate) fn scan(src: &str) -> Result<ParsedFile, ParseError> {
    let lines = logical_lines(src)?;
    let mut sc = Scanner {
        decls: Vec::new(),
        seen: Vec::new(),
    };
    let mut stack = alloc::vec![Scope {
        indent: 0,
        owner: Owner::File,
        decl: None,
    }];
    // Block opened by the previous header, waiting for its first body line.
    let mut pending: Option<(Owner, Option<usize>, u32)> = None;
    let mut last_end = 0u32;

    for logical in &lines {
        let top_indent = stack.last().expect("file scope").indent;
        if let Some((owner, decl, header_line)) = pending.take() {
            if logical.indent <= top_indent {
                return Err(err(header_line, "expected an indented block"));
            }
            stack.push(Scope {
                indent: logical.indent,
                owner,
                decl,
            });
        } else {
            if logical.indent > top_indent {
                return Err(err(logical.start, "unexpected indent"));
            }
            while logical.indent < stack.last().expect("file scope").indent {
                let scope = stack.pop().expect("non-empty");
                if let Some(d) = scope.decl {
                    sc.decls[d].line_end = last_end;
                }
            }
            if logical.indent != stack.last().expect("file scope").indent {
                return Err(err(logical.start, "unindent does not match any outer indentation level"));
            }
        }
        last_end = logical.end;

        let owner = stack.last().expect("file scope").owner;
        let text = logical.text.trim_start();
        let opens_block = text.ends_with(':');
        let def_text = text.strip_prefix("async ").map(str::trim_start).unwrap_or(text);

        if let Some(rest) = def_text.strip_prefix("def ").or_else(|| def_text.strip_prefix("class ")) {
            let is_class = def_text.starts_with("class ");
            let name_off = logical.text.len() - rest.trim_start().len();
            let name = leading_ident(rest.trim_start());
            let (kind, parent, new_owner) = match (is_class, owner) {
                (_, Owner::Opaque) => (None, None, Owner::Opaque),
                (true, Owner::Function(_)) => (None, None, Owner::Opaque),
                (true, Owner::File) => (Some(EntityKind::TypeDef), None, Owner::Opaque),
                (true, Owner::Class(c)) => (Some(EntityKind::TypeDef), Some(c), Owner::Opaque),
                (false, Owner::File) => (Some(EntityKind::Function), None, Owner::Opaque),
                (false, Owner::Class(c) | Owner::Function(c)) => (Some(EntityKind::Function), Some(c), Owner::Opaque),
            };
            let mut decl = None;
            let mut block_owner = new_owner;
            if let (Some(kind), false) = (kind, name.is_empty()) {
                let line = logical.line_at(name_off);
                let d = sc.push(kind, name, line, logical.end, parent);
                decl = Some(d);
                block_owner = if is_class { Owner::Class(d) } else { Owner::Function(d) };
                if !is_class {
                    if let Some(open) = logical.text[name_off..].find('(') {
                        sc.params(logical, name_off + open, d);
                    }
                }
            }
            if opens_block {
                pending = Some((block_owner, decl, logical.start));
            }
            continue;
        }

        if opens_block {
            pending = Some((owner, None, logical.start));
            continue;
        }
        sc.statement(logical, owner);
    }

    if let Some((_, _, header_line)) = pending {
        return Err(err(header_line, "expected an indented block"));
    }
    while let Some(scope) = stack.pop() {
        if let Some(d) = scope.decl {
            sc.decls[d].line_end = last_end;
        }
    }
    Ok(ParsedFile {
        package: None,
        decls: sc.decls,
    })
}
