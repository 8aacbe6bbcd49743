//! PDF to [`DocumentModel`]: a small content-stream interpreter that tracks
//! the text and graphics state well enough to place every glyph, then groups
//! glyph runs into lines and font-homogeneous spans.

use std::collections::BTreeMap;

use lopdf::content::Content;
use lopdf::Encoding;
use lopdf::{Dictionary, Document, Object, ObjectId};
use scisoftx_core::digest::sha256_hex;
use scisoftx_core::layout::{cluster_lines, Positioned, DEFAULT_BASELINE_TOLERANCE_PT};
use scisoftx_core::{DocumentModel, FontInfo, SpanId, TextSpan};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("malformed PDF: {0}")]
    MalformedDocument(String),
    #[error("the PDF is encrypted")]
    EncryptedDocument,
}

/// Forms nested deeper than this are not entered.
const MAX_FORM_DEPTH: usize = 8;
/// A `TJ` adjustment at or below this value (thousandths of an em) reads as a word break.
const TJ_SPACE_THRESHOLD: f64 = -250.0;
/// Horizontal gap, as a fraction of the font size, that separates two words.
const WORD_GAP_FACTOR: f64 = 0.2;

pub fn extract_spans(pdf_bytes: &[u8]) -> Result<DocumentModel, ExtractError> {
    extract_spans_with(pdf_bytes, DEFAULT_BASELINE_TOLERANCE_PT)
}

pub fn extract_spans_with(pdf_bytes: &[u8], baseline_tolerance_pt: f64) -> Result<DocumentModel, ExtractError> {
    let declares_encryption = contains(pdf_bytes, b"/Encrypt");
    let doc = match Document::load_mem(pdf_bytes) {
        Ok(doc) => doc,
        Err(_) if declares_encryption => return Err(ExtractError::EncryptedDocument),
        Err(e) => return Err(ExtractError::MalformedDocument(e.to_string())),
    };
    if doc.is_encrypted() || doc.was_encrypted() {
        return Err(ExtractError::EncryptedDocument);
    }
    let pages = doc.get_pages();
    if pages.is_empty() {
        return Err(ExtractError::MalformedDocument("document has no pages".into()));
    }

    let mut spans = Vec::new();
    for (&number, &page_id) in &pages {
        let fragments = page_fragments(&doc, page_id)?;
        for line in cluster_lines(fragments, baseline_tolerance_pt) {
            build_line_spans(number, line.number, line.items, &mut spans);
        }
    }
    let model = DocumentModel {
        page_count: pages.len() as u32,
        source_digest: sha256_hex(pdf_bytes),
        spans,
    };
    model
        .validate()
        .map_err(|e| ExtractError::MalformedDocument(format!("extracted model is inconsistent: {e}")))?;
    Ok(model)
}

fn contains(haystack: &[u8], needle: &[u8]) -> bool {
    haystack.windows(needle.len()).any(|w| w == needle)
}

/// One shown string after positioning: the glyphs of a single text-showing
/// operator, all in one font.
#[derive(Debug, Clone)]
struct Fragment {
    font: FontInfo,
    chars: Vec<char>,
    x0: f64,
    x1: f64,
    baseline: f64,
}

impl Positioned for Fragment {
    fn baseline(&self) -> f64 {
        self.baseline
    }

    fn x_start(&self) -> f64 {
        self.x0
    }
}

fn is_word_gap(prev: &Fragment, next: &Fragment) -> bool {
    let size = prev.font.size_pt.min(next.font.size_pt);
    next.x0 - prev.x1 > WORD_GAP_FACTOR * size
}

fn build_line_spans(page: u32, line: u32, fragments: Vec<Fragment>, out: &mut Vec<TextSpan>) {
    let mut offset = 0u32;
    let mut current: Option<TextSpan> = None;
    let mut prev: Option<Fragment> = None;
    for frag in fragments {
        let gap = prev.as_ref().is_some_and(|p| {
            is_word_gap(p, &frag)
                && !p.chars.last().is_some_and(|c| c.is_whitespace())
                && !frag.chars.first().is_some_and(|c| c.is_whitespace())
        });
        let len = frag.chars.len() as u32;
        let [y0, y1] = [frag.baseline - 0.2 * frag.font.size_pt, frag.baseline + 0.8 * frag.font.size_pt];
        match current.as_mut() {
            Some(span) if span.font == frag.font => {
                if gap {
                    span.text.push(' ');
                    offset += 1;
                }
                span.text.extend(&frag.chars);
                span.char_end = offset + len;
                span.bbox = [
                    span.bbox[0].min(frag.x0),
                    span.bbox[1].min(y0),
                    span.bbox[2].max(frag.x1),
                    span.bbox[3].max(y1),
                ];
            }
            _ => {
                if let Some(done) = current.take() {
                    out.push(done);
                }
                if gap {
                    offset += 1;
                }
                current = Some(TextSpan {
                    span_id: SpanId(out.len() as u32),
                    page,
                    line,
                    char_start: offset,
                    char_end: offset + len,
                    text: frag.chars.iter().collect(),
                    bbox: [frag.x0, y0, frag.x1.max(frag.x0), y1],
                    font: frag.font.clone(),
                });
            }
        }
        offset += len;
        prev = Some(frag);
    }
    out.extend(current);
}

type Matrix = [f64; 6];

const IDENTITY: Matrix = [1.0, 0.0, 0.0, 1.0, 0.0, 0.0];

fn mul(a: &Matrix, b: &Matrix) -> Matrix {
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
        a[4] * b[0] + a[5] * b[2] + b[4],
        a[4] * b[1] + a[5] * b[3] + b[5],
    ]
}

fn apply(m: &Matrix, x: f64, y: f64) -> (f64, f64) {
    (m[0] * x + m[2] * y + m[4], m[1] * x + m[3] * y + m[5])
}

fn translate(tx: f64, ty: f64) -> Matrix {
    [1.0, 0.0, 0.0, 1.0, tx, ty]
}

/// What the interpreter needs to know about one font resource.
struct LoadedFont<'a> {
    info_name: String,
    flags: u32,
    two_byte: bool,
    encoding: Option<Encoding<'a>>,
    first_char: u32,
    widths: Vec<f64>,
    cid_widths: BTreeMap<u32, f64>,
    default_width: f64,
}

impl LoadedFont<'_> {
    fn width(&self, code: u32) -> f64 {
        if self.two_byte {
            return self.cid_widths.get(&code).copied().unwrap_or(self.default_width);
        }
        code.checked_sub(self.first_char)
            .and_then(|i| self.widths.get(i as usize))
            .copied()
            .unwrap_or(self.default_width)
    }

    fn decode(&self, code_bytes: &[u8]) -> String {
        let decoded = self.encoding.as_ref().and_then(|e| e.bytes_to_string(code_bytes).ok());
        match decoded {
            Some(s) => s,
            None if self.two_byte => char::from_u32(u16::from_be_bytes([code_bytes[0], code_bytes[1]]) as u32)
                .map(String::from)
                .unwrap_or_default(),
            None => code_bytes.iter().map(|&b| b as char).collect(),
        }
    }
}

fn strip_subset_prefix(name: &str) -> &str {
    match name.split_once('+') {
        Some((tag, rest)) if tag.len() == 6 && tag.bytes().all(|b| b.is_ascii_uppercase()) => rest,
        _ => name,
    }
}

fn num(obj: &Object) -> Option<f64> {
    obj.as_float().ok().map(f64::from)
}

fn deref<'a>(doc: &'a Document, obj: &'a Object) -> &'a Object {
    doc.dereference(obj).map(|(_, o)| o).unwrap_or(obj)
}

fn dict_num(doc: &Document, dict: &Dictionary, key: &[u8]) -> Option<f64> {
    dict.get(key).ok().and_then(|o| num(deref(doc, o)))
}

fn load_font<'a>(doc: &'a Document, dict: &'a Dictionary) -> LoadedFont<'a> {
    let subtype = dict.get(b"Subtype").and_then(Object::as_name).unwrap_or(b"");
    let two_byte = subtype == b"Type0";
    let base_name = dict
        .get(b"BaseFont")
        .and_then(Object::as_name)
        .map(|n| String::from_utf8_lossy(n).into_owned())
        .unwrap_or_default();
    let info_name = strip_subset_prefix(&base_name).to_string();

    let descendant = two_byte
        .then(|| {
            dict.get_deref(b"DescendantFonts", doc)
                .and_then(Object::as_array)
                .ok()
                .and_then(|a| a.first())
                .and_then(|o| deref(doc, o).as_dict().ok())
        })
        .flatten();
    let descriptor = descendant
        .unwrap_or(dict)
        .get_deref(b"FontDescriptor", doc)
        .and_then(Object::as_dict)
        .ok();
    let flags = descriptor
        .and_then(|d| dict_num(doc, d, b"Flags"))
        .map(|f| f as i64 as u32)
        .unwrap_or(0);
    let is_mono = scisoftx_core::detect_monospace(&info_name, flags);

    let mut widths = Vec::new();
    let mut cid_widths = BTreeMap::new();
    let default_width;
    if let Some(cid) = descendant {
        default_width = dict_num(doc, cid, b"DW").unwrap_or(1000.0);
        if let Ok(w) = cid.get_deref(b"W", doc).and_then(Object::as_array) {
            parse_cid_widths(doc, w, &mut cid_widths);
        }
    } else {
        default_width = descriptor
            .and_then(|d| dict_num(doc, d, b"MissingWidth"))
            .filter(|w| *w > 0.0)
            .unwrap_or(if is_mono { 600.0 } else { 500.0 });
        if let Ok(w) = dict.get_deref(b"Widths", doc).and_then(Object::as_array) {
            widths = w.iter().map(|o| num(deref(doc, o)).unwrap_or(default_width)).collect();
        }
    }
    LoadedFont {
        info_name,
        flags,
        two_byte,
        encoding: dict.get_font_encoding(doc).ok(),
        first_char: dict_num(doc, dict, b"FirstChar").unwrap_or(0.0) as u32,
        widths,
        cid_widths,
        default_width,
    }
}

/// Parses a CIDFont `/W` array: `c [w1 w2 ...]` and `c_first c_last w` entries.
fn parse_cid_widths(doc: &Document, w: &[Object], out: &mut BTreeMap<u32, f64>) {
    let mut i = 0;
    while i < w.len() {
        let Some(first) = num(deref(doc, &w[i])) else { return };
        match w.get(i + 1).map(|o| deref(doc, o)) {
            Some(Object::Array(list)) => {
                for (k, o) in list.iter().enumerate() {
                    if let Some(width) = num(deref(doc, o)) {
                        out.insert(first as u32 + k as u32, width);
                    }
                }
                i += 2;
            }
            Some(last) => {
                let (Some(last), Some(width)) = (num(last), w.get(i + 2).and_then(|o| num(deref(doc, o)))) else {
                    return;
                };
                for c in first as u32..=last as u32 {
                    out.insert(c, width);
                }
                i += 3;
            }
            None => return,
        }
    }
}

#[derive(Clone)]
struct GraphicsState {
    ctm: Matrix,
    font: Option<Vec<u8>>,
    size: f64,
    char_spacing: f64,
    word_spacing: f64,
    horizontal_scale: f64,
    leading: f64,
    rise: f64,
}

impl Default for GraphicsState {
    fn default() -> Self {
        GraphicsState {
            ctm: IDENTITY,
            font: None,
            size: 0.0,
            char_spacing: 0.0,
            word_spacing: 0.0,
            horizontal_scale: 1.0,
            leading: 0.0,
            rise: 0.0,
        }
    }
}

struct Interpreter<'a> {
    doc: &'a Document,
    fonts: BTreeMap<ObjectId, LoadedFont<'a>>,
    inline_fonts: BTreeMap<Vec<u8>, LoadedFont<'a>>,
    fragments: Vec<Fragment>,
}

/// Resources visible to one content stream.
struct Scope<'a> {
    fonts: BTreeMap<Vec<u8>, FontRef<'a>>,
    xobjects: Option<&'a Dictionary>,
}

#[derive(Clone, Copy)]
enum FontRef<'a> {
    Indirect(ObjectId),
    Direct(&'a Dictionary),
}

fn page_fragments(doc: &Document, page_id: ObjectId) -> Result<Vec<Fragment>, ExtractError> {
    let malformed = |e: lopdf::Error| ExtractError::MalformedDocument(e.to_string());
    let (resources, inherited) = doc.get_page_resources(page_id).map_err(malformed)?;
    let mut scope = Scope { fonts: BTreeMap::new(), xobjects: None };
    let all = resources
        .into_iter()
        .chain(inherited.iter().filter_map(|&id| doc.get_dictionary(id).ok()));
    for res in all {
        add_resources(doc, res, &mut scope);
    }
    let content = doc.get_page_content(page_id);
    let ops = Content::decode(&content).map_err(malformed)?;
    let mut interp = Interpreter {
        doc,
        fonts: BTreeMap::new(),
        inline_fonts: BTreeMap::new(),
        fragments: Vec::new(),
    };
    interp.run(&ops.operations, &scope, GraphicsState::default(), 0);
    Ok(interp.fragments)
}

fn add_resources<'a>(doc: &'a Document, res: &'a Dictionary, scope: &mut Scope<'a>) {
    if let Ok(fonts) = res.get_deref(b"Font", doc).and_then(Object::as_dict) {
        for (name, value) in fonts.iter() {
            let font = match value {
                Object::Reference(id) => FontRef::Indirect(*id),
                Object::Dictionary(d) => FontRef::Direct(d),
                _ => continue,
            };
            scope.fonts.entry(name.clone()).or_insert(font);
        }
    }
    if scope.xobjects.is_none() {
        scope.xobjects = res.get_deref(b"XObject", doc).and_then(Object::as_dict).ok();
    }
}

fn operand_nums(ops: &[Object]) -> Vec<f64> {
    ops.iter().filter_map(num).collect()
}

impl<'a> Interpreter<'a> {
    fn font(&mut self, scope: &Scope<'a>, name: &[u8]) -> Option<&LoadedFont<'a>> {
        match *scope.fonts.get(name)? {
            FontRef::Indirect(id) => {
                if !self.fonts.contains_key(&id) {
                    let dict = self.doc.get_dictionary(id).ok()?;
                    self.fonts.insert(id, load_font(self.doc, dict));
                }
                self.fonts.get(&id)
            }
            FontRef::Direct(dict) => Some(
                self.inline_fonts
                    .entry(name.to_vec())
                    .or_insert_with(|| load_font(self.doc, dict)),
            ),
        }
    }

    fn run(&mut self, ops: &[lopdf::content::Operation], scope: &Scope<'a>, initial: GraphicsState, depth: usize) {
        let mut gs = initial;
        let mut stack: Vec<GraphicsState> = Vec::new();
        let mut tm = IDENTITY;
        let mut tlm = IDENTITY;
        for op in ops {
            let args = &op.operands;
            let n = operand_nums(args);
            match op.operator.as_str() {
                "q" => stack.push(gs.clone()),
                "Q" => {
                    if let Some(saved) = stack.pop() {
                        gs = saved;
                    }
                }
                "cm" if n.len() == 6 => {
                    let m = [n[0], n[1], n[2], n[3], n[4], n[5]];
                    gs.ctm = mul(&m, &gs.ctm);
                }
                "BT" => {
                    tm = IDENTITY;
                    tlm = IDENTITY;
                }
                "Tf" => {
                    if let (Some(name), Some(&size)) = (args.first().and_then(|o| o.as_name().ok()), n.last()) {
                        gs.font = Some(name.to_vec());
                        gs.size = size;
                    }
                }
                "Tc" if !n.is_empty() => gs.char_spacing = n[0],
                "Tw" if !n.is_empty() => gs.word_spacing = n[0],
                "Tz" if !n.is_empty() => gs.horizontal_scale = n[0] / 100.0,
                "TL" if !n.is_empty() => gs.leading = n[0],
                "Ts" if !n.is_empty() => gs.rise = n[0],
                "Td" if n.len() == 2 => {
                    tlm = mul(&translate(n[0], n[1]), &tlm);
                    tm = tlm;
                }
                "TD" if n.len() == 2 => {
                    gs.leading = -n[1];
                    tlm = mul(&translate(n[0], n[1]), &tlm);
                    tm = tlm;
                }
                "Tm" if n.len() == 6 => {
                    tlm = [n[0], n[1], n[2], n[3], n[4], n[5]];
                    tm = tlm;
                }
                "T*" => {
                    tlm = mul(&translate(0.0, -gs.leading), &tlm);
                    tm = tlm;
                }
                "Tj" => {
                    if let Some(s) = args.first().and_then(|o| o.as_str().ok()) {
                        self.show(scope, &gs, &mut tm, &[ShowItem::Text(s)]);
                    }
                }
                "'" | "\"" => {
                    if op.operator == "\"" && n.len() >= 2 {
                        gs.word_spacing = n[0];
                        gs.char_spacing = n[1];
                    }
                    tlm = mul(&translate(0.0, -gs.leading), &tlm);
                    tm = tlm;
                    if let Some(s) = args.last().and_then(|o| o.as_str().ok()) {
                        self.show(scope, &gs, &mut tm, &[ShowItem::Text(s)]);
                    }
                }
                "TJ" => {
                    if let Some(items) = args.first().and_then(|o| o.as_array().ok()) {
                        let items: Vec<ShowItem> = items
                            .iter()
                            .filter_map(|o| match o {
                                Object::String(s, _) => Some(ShowItem::Text(s)),
                                other => num(other).map(ShowItem::Adjust),
                            })
                            .collect();
                        self.show(scope, &gs, &mut tm, &items);
                    }
                }
                "Do" if depth < MAX_FORM_DEPTH => {
                    if let Some(name) = args.first().and_then(|o| o.as_name().ok()) {
                        self.form(scope, name, &gs, depth);
                    }
                }
                _ => {}
            }
        }
    }

    fn form(&mut self, scope: &Scope<'a>, name: &[u8], gs: &GraphicsState, depth: usize) {
        let doc = self.doc;
        let Some(stream) = scope
            .xobjects
            .and_then(|x| x.get_deref(name, doc).ok())
            .and_then(|o| o.as_stream().ok())
        else {
            return;
        };
        if stream.dict.get(b"Subtype").and_then(Object::as_name).ok() != Some(b"Form".as_slice()) {
            return;
        }
        let content = stream.decompressed_content().unwrap_or_else(|_| stream.content.clone());
        let Ok(ops) = Content::decode(&content) else { return };
        let mut inner = Scope { fonts: BTreeMap::new(), xobjects: None };
        if let Ok(res) = stream.dict.get_deref(b"Resources", doc).and_then(Object::as_dict) {
            add_resources(doc, res, &mut inner);
        }
        for (k, v) in &scope.fonts {
            inner.fonts.entry(k.clone()).or_insert(*v);
        }
        if inner.xobjects.is_none() {
            inner.xobjects = scope.xobjects;
        }
        let mut state = gs.clone();
        if let Ok(m) = stream.dict.get(b"Matrix").and_then(Object::as_array) {
            let m = operand_nums(m);
            if m.len() == 6 {
                state.ctm = mul(&[m[0], m[1], m[2], m[3], m[4], m[5]], &state.ctm);
            }
        }
        self.run(&ops.operations, &inner, state, depth + 1);
    }

    fn show(&mut self, scope: &Scope<'a>, gs: &GraphicsState, tm: &mut Matrix, items: &[ShowItem<'_>]) {
        let Some(font_name) = gs.font.clone() else { return };
        let Some(font) = self.font(scope, &font_name) else { return };
        let start = mul(tm, &gs.ctm);
        let scale = (start[2] * start[2] + start[3] * start[3]).sqrt();
        let size = (gs.size * scale).abs();
        let mut chars = Vec::new();
        let mut x_end = apply(&start, 0.0, gs.rise).0;
        let x_start = x_end;
        for item in items {
            match *item {
                ShowItem::Adjust(a) => {
                    if a <= TJ_SPACE_THRESHOLD && !chars.is_empty() && chars.last() != Some(&' ') {
                        chars.push(' ');
                    }
                    let tx = -a / 1000.0 * gs.size * gs.horizontal_scale;
                    *tm = mul(&translate(tx, 0.0), tm);
                }
                ShowItem::Text(bytes) => {
                    let step = if font.two_byte { 2 } else { 1 };
                    for code_bytes in bytes.chunks(step) {
                        if code_bytes.len() < step {
                            break;
                        }
                        let code = code_bytes.iter().fold(0u32, |acc, &b| acc * 256 + b as u32);
                        let w = font.width(code) / 1000.0;
                        let spacing = gs.char_spacing + if step == 1 && code == 32 { gs.word_spacing } else { 0.0 };
                        let tx = (w * gs.size + spacing) * gs.horizontal_scale;
                        chars.extend(font.decode(code_bytes).chars().filter(|c| !c.is_control()));
                        *tm = mul(&translate(tx, 0.0), tm);
                        x_end = apply(&mul(tm, &gs.ctm), 0.0, gs.rise).0;
                    }
                }
            }
        }
        if chars.is_empty() || !(size > 0.0) || !size.is_finite() {
            return;
        }
        let baseline = apply(&start, 0.0, gs.rise).1;
        let info = FontInfo::new(font.info_name.clone(), font.flags, round_size(size));
        self.fragments.push(Fragment {
            font: info,
            chars,
            x0: x_start.min(x_end),
            x1: x_start.max(x_end),
            baseline,
        });
    }
}

/// Sizes are compared for span merging; rounding avoids splitting a run over
/// float noise from matrix products.
fn round_size(size: f64) -> f64 {
    (size * 1000.0).round() / 1000.0
}

enum ShowItem<'b> {
    Text(&'b [u8]),
    Adjust(f64),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_prefix() {
        assert_eq!(strip_subset_prefix("ABCDEF+CMTT10"), "CMTT10");
        assert_eq!(strip_subset_prefix("Abcdef+X"), "Abcdef+X");
        assert_eq!(strip_subset_prefix("Courier"), "Courier");
    }

    #[test]
    fn matrix_product_order() {
        let m = mul(&translate(10.0, 0.0), &[2.0, 0.0, 0.0, 2.0, 0.0, 0.0]);
        assert_eq!(apply(&m, 0.0, 0.0), (20.0, 0.0));
    }

    #[test]
    fn garbage_is_malformed() {
        assert!(matches!(extract_spans(b"not a pdf"), Err(ExtractError::MalformedDocument(_))));
    }
}
