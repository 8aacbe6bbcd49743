//! Structural scanner for the brace-delimited, Java-like profile.
//!
//! Not a full parser: it lexes, tracks brace frames, and recognises member
//! and local declarations from the token run preceding each `{` or `;`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{is_ident_char, is_ident_start, Decl, EntityKind, ParseError, ParsedFile};

pub(crate) const KEYWORDS: &[&str] = &[
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char", "class", "const",
    "continue", "default", "do", "double", "else", "enum", "extends", "final", "finally", "float",
    "for", "goto", "if", "implements", "import", "instanceof", "int", "interface", "long", "native",
    "new", "package", "private", "protected", "public", "return", "short", "static", "strictfp",
    "super", "switch", "synchronized", "this", "throw", "throws", "transient", "try", "void",
    "volatile", "while", "true", "false", "null", "var", "record", "yield",
];

const PRIMITIVES: &[&str] = &[
    "boolean", "byte", "char", "double", "float", "int", "long", "short", "void", "var",
];

const MODIFIERS: &[&str] = &[
    "abstract", "final", "native", "private", "protected", "public", "static", "strictfp",
    "synchronized", "transient", "volatile", "default", "sealed", "non-sealed",
];

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Punct(char),
    /// Two-character operators such as `==`, `->`, `::`.
    Op,
    Literal,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: u32,
}

impl Token {
    fn ident(&self) -> Option<&str> {
        match &self.tok {
            Tok::Ident(s) => Some(s),
            _ => None,
        }
    }

    fn is(&self, c: char) -> bool {
        self.tok == Tok::Punct(c)
    }

    fn is_word(&self, w: &str) -> bool {
        self.ident() == Some(w)
    }
}

fn err(line: u32, message: &str) -> ParseError {
    ParseError {
        line,
        message: message.to_string(),
    }
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    let mut line = 1u32;
    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        if c == '\n' {
            line += 1;
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if c == '/' && next == Some('/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if c == '/' && next == Some('*') {
            let start = line;
            i += 2;
            loop {
                match chars.get(i) {
                    None => return Err(err(start, "unterminated block comment")),
                    Some('*') if chars.get(i + 1) == Some(&'/') => {
                        i += 2;
                        break;
                    }
                    Some('\n') => {
                        line += 1;
                        i += 1;
                    }
                    Some(_) => i += 1,
                }
            }
        } else if c == '"' && next == Some('"') && chars.get(i + 2) == Some(&'"') {
            let start = line;
            i += 3;
            loop {
                match chars.get(i) {
                    None => return Err(err(start, "unterminated text block")),
                    Some('\\') => i += 2,
                    Some('"') if chars.get(i + 1) == Some(&'"') && chars.get(i + 2) == Some(&'"') => {
                        i += 3;
                        break;
                    }
                    Some('\n') => {
                        line += 1;
                        i += 1;
                    }
                    Some(_) => i += 1,
                }
            }
            tokens.push(Token { tok: Tok::Literal, line: start });
        } else if c == '"' || c == '\'' {
            i += 1;
            loop {
                match chars.get(i) {
                    None | Some('\n') => return Err(err(line, "unterminated literal")),
                    Some('\\') => i += 2,
                    Some(&q) if q == c => {
                        i += 1;
                        break;
                    }
                    Some(_) => i += 1,
                }
            }
            tokens.push(Token { tok: Tok::Literal, line });
        } else if is_ident_start(c) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            tokens.push(Token { tok: Tok::Ident(word), line });
        } else if c.is_ascii_digit() {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '.') {
                i += 1;
            }
            tokens.push(Token { tok: Tok::Literal, line });
        } else {
            let two = matches!(
                (c, next),
                ('=', Some('='))
                    | ('!', Some('='))
                    | ('<', Some('='))
                    | ('>', Some('='))
                    | ('-', Some('>'))
                    | (':', Some(':'))
                    | ('&', Some('&'))
                    | ('|', Some('|'))
                    | ('+', Some('='))
                    | ('-', Some('='))
                    | ('*', Some('='))
                    | ('/', Some('='))
            );
            if two {
                tokens.push(Token { tok: Tok::Op, line });
                i += 2;
            } else {
                tokens.push(Token { tok: Tok::Punct(c), line });
                i += 1;
            }
        }
    }
    Ok(tokens)
}

/// Drops annotations (`@Name`, `@a.b.Name(...)`), keeping `@interface`.
fn strip_annotations(tokens: &[Token]) -> Vec<Token> {
    let mut out = Vec::with_capacity(tokens.len());
    let mut i = 0;
    while i < tokens.len() {
        if tokens[i].is('@') && tokens.get(i + 1).is_some_and(|t| t.ident().is_some() && !t.is_word("interface")) {
            i += 2;
            while tokens.get(i).is_some_and(|t| t.is('.')) && tokens.get(i + 1).is_some_and(|t| t.ident().is_some()) {
                i += 2;
            }
            if tokens.get(i).is_some_and(|t| t.is('(')) {
                let mut depth = 0;
                while let Some(t) = tokens.get(i) {
                    if t.is('(') {
                        depth += 1;
                    } else if t.is(')') {
                        depth -= 1;
                        if depth == 0 {
                            i += 1;
                            break;
                        }
                    }
                    i += 1;
                }
            }
            continue;
        }
        out.push(tokens[i].clone());
        i += 1;
    }
    out
}

fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

/// Index of the first `=` at paren depth zero.
fn top_level_assign(tokens: &[Token]) -> Option<usize> {
    let mut depth = 0i32;
    for (i, t) in tokens.iter().enumerate() {
        match t.tok {
            Tok::Punct('(') | Tok::Punct('[') => depth += 1,
            Tok::Punct(')') | Tok::Punct(']') => depth -= 1,
            Tok::Punct('=') if depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}

/// Splits on commas outside parentheses and angle brackets.
fn split_commas(tokens: &[Token]) -> Vec<&[Token]> {
    let mut parts = Vec::new();
    let (mut paren, mut angle) = (0i32, 0i32);
    let mut start = 0;
    for (i, t) in tokens.iter().enumerate() {
        match t.tok {
            Tok::Punct('(') | Tok::Punct('[') | Tok::Punct('{') => paren += 1,
            Tok::Punct(')') | Tok::Punct(']') | Tok::Punct('}') => paren -= 1,
            Tok::Punct('<') => angle += 1,
            Tok::Punct('>') => angle = (angle - 1).max(0),
            Tok::Punct(',') if paren == 0 && angle == 0 => {
                parts.push(&tokens[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&tokens[start..]);
    parts
}

/// The type keyword (`class`, `interface`, `enum`, `record`) and the name
/// following it, if `header` declares a type.
fn type_header(header: &[Token]) -> Option<(&Token, bool)> {
    for (i, t) in header.iter().enumerate() {
        let Some(word) = t.ident() else { continue };
        let is_type_kw = matches!(word, "class" | "interface" | "enum" | "record");
        if !is_type_kw {
            continue;
        }
        // `Foo.class` is a literal, not a declaration.
        if i > 0 && header[i - 1].is('.') {
            continue;
        }
        let name = header.get(i + 1)?;
        let n = name.ident()?;
        if is_keyword(n) {
            return None;
        }
        return Some((name, word == "enum"));
    }
    None
}

/// Name token of a method header: the identifier right before the first
/// top-level `(`, plus the index of that `(`.
fn method_name(header: &[Token]) -> Option<(&Token, usize)> {
    let open = header.iter().position(|t| t.is('('))?;
    let name = header.get(open.checked_sub(1)?)?;
    let word = name.ident()?;
    if is_keyword(word) {
        return None;
    }
    let before = &header[..open - 1];
    if before
        .iter()
        .any(|t| t.is('=') || t.tok == Tok::Op || t.is_word("new") || t.is_word("return"))
    {
        return None;
    }
    Some((name, open))
}

fn matching_paren(tokens: &[Token], open: usize) -> Option<usize> {
    let mut depth = 0;
    for (i, t) in tokens.iter().enumerate().skip(open) {
        if t.is('(') {
            depth += 1;
        } else if t.is(')') {
            depth -= 1;
            if depth == 0 {
                return Some(i);
            }
        }
    }
    None
}

/// Checks `[final] Type name` at the start of a statement, where Type is a
/// dotted name with optional generic arguments and array brackets. Returns
/// the index of the name token.
fn local_decl_name(stmt: &[Token]) -> Option<usize> {
    let mut i = 0;
    while stmt.get(i).is_some_and(|t| t.is_word("final")) {
        i += 1;
    }
    let first = stmt.get(i)?.ident()?;
    if is_keyword(first) && !PRIMITIVES.contains(&first) {
        return None;
    }
    i += 1;
    while stmt.get(i).is_some_and(|t| t.is('.')) {
        stmt.get(i + 1)?.ident()?;
        i += 2;
    }
    if stmt.get(i).is_some_and(|t| t.is('<')) {
        let mut depth = 0;
        loop {
            let t = stmt.get(i)?;
            if t.is('<') {
                depth += 1;
            } else if t.is('>') {
                depth -= 1;
            } else if !(t.ident().is_some() || t.is(',') || t.is('.') || t.is('?') || t.is('[') || t.is(']')) {
                return None;
            }
            i += 1;
            if depth == 0 {
                break;
            }
        }
    }
    while stmt.get(i).is_some_and(|t| t.is('[')) && stmt.get(i + 1).is_some_and(|t| t.is(']')) {
        i += 2;
    }
    let name = stmt.get(i)?.ident()?;
    if is_keyword(name) {
        return None;
    }
    match stmt.get(i + 1) {
        None => Some(i),
        Some(t) if t.is('=') || t.is(',') || t.is('[') => Some(i),
        _ => None,
    }
}

#[derive(Debug)]
enum Frame {
    File,
    Type { decl: usize, is_enum: bool, in_constants: bool },
    Method { decl: usize },
    /// A statement block inside a method body.
    Block { method: usize },
    /// Braces of an initializer or enum constant body; the header resumes after them.
    Resume { header: Vec<Token>, depth: i32 },
    /// Content we do not look into (anonymous or local classes, initializer blocks).
    Opaque,
}

struct Scanner {
    decls: Vec<Decl>,
    package: Option<String>,
    frames: Vec<Frame>,
    /// Local variable names already recorded per method decl.
    locals: Vec<(usize, String)>,
}

impl Scanner {
    fn push_decl(&mut self, kind: EntityKind, name: &str, line_start: u32, line_end: u32, parent: Option<usize>) -> usize {
        self.decls.push(Decl {
            kind,
            name: name.to_string(),
            line_start,
            line_end,
            parent,
        });
        self.decls.len() - 1
    }

    fn in_opaque(&self) -> bool {
        self.frames.iter().any(|f| matches!(f, Frame::Opaque))
    }

    fn open(&mut self, header: Vec<Token>, brace_line: u32, depth: i32) -> Vec<Token> {
        if self.in_opaque() {
            self.frames.push(Frame::Opaque);
            return Vec::new();
        }
        let header_clean = strip_annotations(&header);
        let top = self.frames.last().expect("file frame");
        match top {
            Frame::File | Frame::Type { in_constants: false, .. } => {
                let parent = match top {
                    Frame::Type { decl, .. } => Some(*decl),
                    _ => None,
                };
                if let Some((name, is_enum)) = type_header(&header_clean) {
                    let name_str = name.ident().unwrap_or_default().to_string();
                    let decl = self.push_decl(EntityKind::TypeDef, &name_str, name.line, brace_line, parent);
                    self.frames.push(Frame::Type { decl, is_enum, in_constants: is_enum });
                    return Vec::new();
                }
                if top_level_assign(&header_clean).is_some() {
                    self.frames.push(Frame::Resume { header, depth });
                    return Vec::new();
                }
                if let (Some(parent), Some((name, open))) = (parent, method_name(&header_clean)) {
                    let name_str = name.ident().unwrap_or_default().to_string();
                    let decl = self.push_decl(EntityKind::Function, &name_str, name.line, brace_line, Some(parent));
                    self.params(&header_clean, open, decl);
                    self.frames.push(Frame::Method { decl });
                    return Vec::new();
                }
                self.frames.push(Frame::Opaque);
                Vec::new()
            }
            Frame::Type { in_constants: true, .. } => {
                // Body of an enum constant.
                self.frames.push(Frame::Resume { header, depth });
                Vec::new()
            }
            Frame::Method { decl } | Frame::Block { method: decl } => {
                let method = *decl;
                if top_level_assign(&header_clean).is_some() {
                    self.frames.push(Frame::Resume { header, depth });
                } else if type_header(&header_clean).is_some()
                    || (header_clean.iter().any(|t| t.is_word("new"))
                        && header_clean.last().is_some_and(|t| t.is(')')))
                {
                    self.frames.push(Frame::Opaque);
                } else {
                    self.frames.push(Frame::Block { method });
                }
                Vec::new()
            }
            Frame::Resume { .. } | Frame::Opaque => {
                self.frames.push(Frame::Opaque);
                Vec::new()
            }
        }
    }

    /// Handles `}`. Returns the header to resume with, if any.
    fn close(&mut self, line: u32) -> Result<Option<(Vec<Token>, i32)>, ParseError> {
        match self.frames.pop() {
            None | Some(Frame::File) => Err(err(line, "unmatched '}'")),
            Some(Frame::Type { decl, .. }) | Some(Frame::Method { decl }) => {
                self.decls[decl].line_end = line;
                Ok(None)
            }
            Some(Frame::Resume { header, depth }) => Ok(Some((header, depth))),
            Some(Frame::Block { .. }) | Some(Frame::Opaque) => Ok(None),
        }
    }

    fn params(&mut self, header: &[Token], open: usize, method: usize) {
        let Some(close) = matching_paren(header, open) else { return };
        let inner = &header[open + 1..close];
        if inner.is_empty() {
            return;
        }
        for part in split_commas(inner) {
            let name = part.iter().rev().find_map(|t| t.ident().map(|w| (w, t.line)));
            if let Some((w, line)) = name {
                if !is_keyword(w) && part.len() > 1 {
                    self.push_decl(EntityKind::Parameter, w, line, line, Some(method));
                }
            }
        }
    }

    fn constants(&mut self, header: &[Token], enum_decl: usize) {
        let header = strip_annotations(header);
        for part in split_commas(&header) {
            if let Some(t) = part.first() {
                if let Some(w) = t.ident() {
                    if !is_keyword(w) {
                        self.push_decl(EntityKind::Field, w, t.line, t.line, Some(enum_decl));
                    }
                }
            }
        }
    }

    /// Declarator names of `Type a = x, b[], c;` as `(name, line)`.
    fn declarators(tokens: &[Token], first_name: usize) -> Vec<(String, u32)> {
        let mut out = Vec::new();
        let rest = &tokens[first_name..];
        for (k, part) in split_commas(rest).into_iter().enumerate() {
            let lhs = match top_level_assign(part) {
                Some(eq) => &part[..eq],
                None => part,
            };
            let name = if k == 0 { lhs.first() } else { lhs.iter().find(|t| t.ident().is_some()) };
            if let Some(t) = name {
                if let Some(w) = t.ident() {
                    if !is_keyword(w) {
                        out.push((w.to_string(), t.line));
                    }
                }
            }
        }
        out
    }

    fn statement(&mut self, header: Vec<Token>, semi_line: u32) {
        if header.is_empty() || self.in_opaque() {
            return;
        }
        let header = strip_annotations(&header);
        match self.frames.last() {
            Some(Frame::File) => {
                if header[0].is_word("package") {
                    let mut name = String::new();
                    for t in &header[1..] {
                        match &t.tok {
                            Tok::Ident(w) => name.push_str(w),
                            Tok::Punct('.') => name.push('.'),
                            _ => {}
                        }
                    }
                    if !name.is_empty() {
                        self.package = Some(name);
                    }
                }
            }
            Some(&Frame::Type { decl, is_enum, in_constants }) => {
                if is_enum && in_constants {
                    self.constants(&header, decl);
                    if let Some(Frame::Type { in_constants, .. }) = self.frames.last_mut() {
                        *in_constants = false;
                    }
                    return;
                }
                let mut body = header.as_slice();
                while body.first().and_then(|t| t.ident()).is_some_and(|w| MODIFIERS.contains(&w)) {
                    body = &body[1..];
                }
                let assign = top_level_assign(body);
                let before_assign = &body[..assign.unwrap_or(body.len())];
                if let Some((name, open)) = method_name(before_assign) {
                    // Abstract or interface method.
                    let w = name.ident().unwrap_or_default().to_string();
                    let m = self.push_decl(EntityKind::Function, &w, name.line, semi_line, Some(decl));
                    self.params(body, open, m);
                    return;
                }
                if let Some(first) = local_decl_name(body) {
                    for (name, line) in Self::declarators(body, first) {
                        self.push_decl(EntityKind::Field, &name, line, semi_line.max(line), Some(decl));
                    }
                }
            }
            Some(Frame::Method { decl }) | Some(Frame::Block { method: decl }) => {
                let method = *decl;
                if let Some(first) = local_decl_name(&header) {
                    for (name, line) in Self::declarators(&header, first) {
                        if self.locals.iter().any(|(m, n)| *m == method && *n == name) {
                            continue;
                        }
                        self.locals.push((method, name.clone()));
                        self.push_decl(EntityKind::Variable, &name, line, semi_line.max(line), Some(method));
                    }
                }
            }
            _ => {}
        }
    }
}

pub(crate) fn scan(text: &str) -> Result<ParsedFile, ParseError> {
    let tokens = lex(text)?;
    let mut sc = Scanner {
        decls: Vec::new(),
        package: None,
        frames: alloc::vec![Frame::File],
        locals: Vec::new(),
    };
    let mut header: Vec<Token> = Vec::new();
    let mut depth = 0i32;
    let mut paren_lines: Vec<u32> = Vec::new();

    for t in tokens {
        match t.tok {
            Tok::Punct('(') | Tok::Punct('[') => {
                depth += 1;
                paren_lines.push(t.line);
                header.push(t);
            }
            Tok::Punct(')') | Tok::Punct(']') => {
                depth -= 1;
                paren_lines.pop();
                if depth < 0 {
                    return Err(err(t.line, "unmatched closing bracket"));
                }
                header.push(t);
            }
            Tok::Punct('{') => {
                if depth > 0 {
                    // Lambda or array initializer inside an argument list.
                    sc.frames.push(Frame::Resume { header: core::mem::take(&mut header), depth });
                    depth = 0;
                } else {
                    let h = core::mem::take(&mut header);
                    header = sc.open(h, t.line, depth);
                }
            }
            Tok::Punct('}') => {
                if depth != 0 {
                    return Err(err(t.line, "unclosed bracket before '}'"));
                }
                // Enum constants may run up to the closing brace.
                if let Some(&Frame::Type { decl, is_enum: true, in_constants: true }) = sc.frames.last() {
                    let h = core::mem::take(&mut header);
                    sc.constants(&h, decl);
                }
                match sc.close(t.line)? {
                    Some((h, d)) => {
                        header = h;
                        depth = d;
                    }
                    None => header.clear(),
                }
            }
            Tok::Punct(';') if depth == 0 => {
                let h = core::mem::take(&mut header);
                sc.statement(h, t.line);
            }
            _ => header.push(t),
        }
    }

    if let Some(line) = paren_lines.last() {
        return Err(err(*line, "unclosed bracket"));
    }
    if sc.frames.len() > 1 {
        let line = sc
            .frames
            .iter()
            .rev()
            .find_map(|f| match f {
                Frame::Type { decl, .. } | Frame::Method { decl } => Some(sc.decls[*decl].line_start),
                _ => None,
            })
            .unwrap_or(1);
        return Err(err(line, "unclosed '{'"));
    }
    Ok(ParsedFile {
        package: sc.package,
        decls: sc.decls,
    })
}
