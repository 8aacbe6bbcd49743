//! A minimal PDF writer for test papers. It records exactly what it places on
//! each page, so extraction can be checked against it.

use lopdf::content::{Content, Operation};
use lopdf::{dictionary, Document, Object, ObjectId, Stream, StringFormat};
use serde::{Deserialize, Serialize};

pub const PAGE_WIDTH: f64 = 612.0;
pub const PAGE_HEIGHT: f64 = 792.0;
pub const LEFT_MARGIN: f64 = 72.0;
pub const TOP_BASELINE: f64 = 740.0;
pub const FONT_SIZE: f64 = 10.0;
pub const LEADING: f64 = 13.0;
/// Extra space before a paragraph.
pub const PARAGRAPH_SKIP: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Face {
    /// Proportional body text.
    Times,
    Courier,
    /// Computer Modern typewriter, recognized by name only.
    Cmtt,
    /// Latin Modern mono, recognized by name only.
    LmMono,
    /// A fixed-pitch face whose name gives nothing away; only the FixedPitch flag marks it.
    FlaggedFixed,
    Helvetica,
}

impl Face {
    pub const ALL: [Face; 6] = [Face::Times, Face::Courier, Face::Cmtt, Face::LmMono, Face::FlaggedFixed, Face::Helvetica];

    pub fn postscript_name(self) -> &'static str {
        match self {
            Face::Times => "Times-Roman",
            Face::Courier => "Courier",
            Face::Cmtt => "CMTT10",
            Face::LmMono => "LMMono10-Regular",
            Face::FlaggedFixed => "GlyphCode-Regular",
            Face::Helvetica => "Helvetica",
        }
    }

    pub fn flags(self) -> u32 {
        match self {
            Face::Times => 34,
            Face::Helvetica => 32,
            Face::Courier | Face::FlaggedFixed => 33,
            Face::Cmtt | Face::LmMono => 32,
        }
    }

    pub fn is_monospace(self) -> bool {
        !matches!(self, Face::Times | Face::Helvetica)
    }

    fn resource_name(self) -> String {
        format!("F{}", Face::ALL.iter().position(|&f| f == self).expect("listed"))
    }

    /// Advance width in thousandths of an em.
    pub fn width(self, c: char) -> u32 {
        if self.is_monospace() {
            return 600;
        }
        match c {
            ' ' => 250,
            'i' | 'j' | 'l' | '.' | ',' | ':' | ';' | '\'' | '!' | '|' => 278,
            'f' | 't' | 'r' | '(' | ')' | '[' | ']' | '-' | '/' => 333,
            'm' | 'w' | 'M' | 'W' | '@' | '%' => 778,
            'A'..='Z' => 667,
            _ => 500,
        }
    }

    pub fn text_width(self, s: &str, size: f64) -> f64 {
        s.chars().map(|c| self.width(c) as f64).sum::<f64>() / 1000.0 * size
    }
}

/// A run of text in one face.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub face: Face,
    pub text: String,
}

impl Segment {
    pub fn new(face: Face, text: impl Into<String>) -> Self {
        Segment { face, text: text.into() }
    }
}

/// How a line's content stream is written. Every style yields the same
/// visible text; they differ in the operators used to get there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LineStyle {
    /// One `Tj` per segment, positioned with `Tm`.
    Plain,
    /// A single `TJ` array per segment with small kerning adjustments.
    Kerned,
    /// A space at the end of a body-text segment becomes horizontal
    /// movement instead of a glyph.
    SpacesAsGaps,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageLine {
    pub segments: Vec<Segment>,
    /// Starts a paragraph: a little extra space above.
    #[serde(default)]
    pub paragraph: bool,
    pub style: LineStyle,
}

impl PageLine {
    pub fn new(segments: Vec<Segment>) -> Self {
        PageLine {
            segments,
            paragraph: false,
            style: LineStyle::Plain,
        }
    }

    pub fn text(&self) -> String {
        self.segments.iter().map(|s| s.text.as_str()).collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageSpec {
    pub lines: Vec<PageLine>,
    /// Draw the page's text inside a form XObject instead of the page stream.
    #[serde(default)]
    pub in_form: bool,
}

/// Ground truth for one rendered line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestLine {
    pub page: u32,
    pub line: u32,
    pub text: String,
    /// Texts of the monospace segments on the line, left to right.
    pub monospace: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub page_count: u32,
    pub lines: Vec<ManifestLine>,
}

/// Joins adjacent segments in the same face and drops empty ones.
fn normalized(segments: &[Segment]) -> Vec<Segment> {
    let mut out: Vec<Segment> = Vec::new();
    for s in segments.iter().filter(|s| !s.text.is_empty()) {
        match out.last_mut() {
            Some(last) if last.face == s.face => last.text.push_str(&s.text),
            _ => out.push(s.clone()),
        }
    }
    out
}

pub fn manifest(pages: &[PageSpec]) -> Manifest {
    let mut lines = Vec::new();
    for (p, page) in pages.iter().enumerate() {
        let mut n = 0;
        for line in &page.lines {
            let segments = normalized(&line.segments);
            if segments.is_empty() {
                continue;
            }
            n += 1;
            lines.push(ManifestLine {
                page: p as u32 + 1,
                line: n,
                text: segments.iter().map(|s| s.text.as_str()).collect(),
                monospace: segments
                    .iter()
                    .filter(|s| s.face.is_monospace())
                    .map(|s| s.text.clone())
                    .collect(),
            });
        }
    }
    Manifest {
        page_count: pages.len() as u32,
        lines,
    }
}

fn pdf_string(s: &str) -> Object {
    Object::String(s.bytes().collect(), StringFormat::Literal)
}

fn real(v: f64) -> Object {
    Object::Real(v as f32)
}

fn line_ops(line: &PageLine, y: f64, ops: &mut Vec<Operation>) {
    let segments = normalized(&line.segments);
    let mut x = LEFT_MARGIN;
    ops.push(Operation::new("BT", vec![]));
    for (i, seg) in segments.iter().enumerate() {
        let mut text = seg.text.as_str();
        let mut gap = 0.0;
        let next_differs = segments.get(i + 1).is_some();
        if line.style == LineStyle::SpacesAsGaps && !seg.face.is_monospace() && next_differs && text.ends_with(' ') && !text.trim().is_empty() {
            text = &text[..text.len() - 1];
            gap = seg.face.text_width(" ", FONT_SIZE);
        }
        ops.push(Operation::new("Tf", vec![Object::Name(seg.face.resource_name().into_bytes()), real(FONT_SIZE)]));
        ops.push(Operation::new(
            "Tm",
            vec![1.into(), 0.into(), 0.into(), 1.into(), real(x), real(y)],
        ));
        match line.style {
            LineStyle::Kerned if text.chars().count() > 1 => {
                // Alternate tiny positive and negative kerns so the net advance is unchanged.
                let mut items = Vec::new();
                let chars: Vec<char> = text.chars().collect();
                let mut balance = 0i64;
                for (k, chunk) in chars.chunks(3).enumerate() {
                    items.push(pdf_string(&chunk.iter().collect::<String>()));
                    if (k + 1) * 3 < chars.len() {
                        let kern = if k % 2 == 0 { 15 } else { -15 };
                        balance += kern;
                        items.push(Object::Integer(kern));
                    }
                }
                if balance != 0 {
                    items.push(Object::Integer(-balance));
                }
                ops.push(Operation::new("TJ", vec![Object::Array(items)]));
            }
            _ => ops.push(Operation::new("Tj", vec![pdf_string(text)])),
        }
        x += seg.face.text_width(text, FONT_SIZE) + gap;
    }
    ops.push(Operation::new("ET", vec![]));
}

fn font_object(doc: &mut Document, face: Face) -> ObjectId {
    let widths: Vec<Object> = (32u8..=126).map(|b| Object::Integer(face.width(b as char) as i64)).collect();
    let descriptor = doc.add_object(dictionary! {
        "Type" => "FontDescriptor",
        "FontName" => Object::Name(face.postscript_name().as_bytes().to_vec()),
        "Flags" => face.flags() as i64,
        "FontBBox" => vec![0.into(), (-200).into(), 1000.into(), 800.into()],
        "ItalicAngle" => 0,
        "Ascent" => 800,
        "Descent" => -200,
        "CapHeight" => 700,
        "StemV" => 80,
    });
    doc.add_object(dictionary! {
        "Type" => "Font",
        "Subtype" => "Type1",
        "BaseFont" => Object::Name(face.postscript_name().as_bytes().to_vec()),
        "Encoding" => "WinAnsiEncoding",
        "FirstChar" => 32,
        "LastChar" => 126,
        "Widths" => widths,
        "FontDescriptor" => descriptor,
    })
}

/// Renders pages to PDF bytes. Text must be printable ASCII. Output is
/// deterministic for equal input.
pub fn render_pdf(pages: &[PageSpec]) -> Vec<u8> {
    let mut doc = Document::with_version("1.5");
    let pages_id = doc.new_object_id();
    let mut font_dict = lopdf::Dictionary::new();
    for face in Face::ALL {
        let id = font_object(&mut doc, face);
        font_dict.set(face.resource_name(), id);
    }
    let font_dict_id = doc.add_object(font_dict);
    let resources_id = doc.add_object(dictionary! { "Font" => font_dict_id });

    let mut kids = Vec::new();
    for page in pages {
        let mut ops = Vec::new();
        let mut y = TOP_BASELINE;
        let mut first = true;
        for line in &page.lines {
            if normalized(&line.segments).is_empty() {
                continue;
            }
            if line.paragraph && !first {
                y -= PARAGRAPH_SKIP;
            }
            line_ops(line, y, &mut ops);
            y -= LEADING;
            first = false;
        }
        let text = Content { operations: ops }.encode().expect("content encodes");
        let mut page_resources = dictionary! { "Font" => font_dict_id };
        let body = if page.in_form {
            let form = Stream::new(
                dictionary! {
                    "Type" => "XObject",
                    "Subtype" => "Form",
                    "BBox" => vec![0.into(), 0.into(), real(PAGE_WIDTH), real(PAGE_HEIGHT)],
                    "Resources" => resources_id,
                },
                text,
            );
            let form_id = doc.add_object(form);
            page_resources.set("XObject", dictionary! { "Fm0" => form_id });
            b"q 1 0 0 1 0 0 cm /Fm0 Do Q".to_vec()
        } else {
            let mut wrapped = b"q 1 0 0 1 0 0 cm\n".to_vec();
            wrapped.extend(text);
            wrapped.extend(b"\nQ");
            wrapped
        };
        let content_id = doc.add_object(Stream::new(dictionary! {}, body));
        let page_id = doc.add_object(dictionary! {
            "Type" => "Page",
            "Parent" => pages_id,
            "MediaBox" => vec![0.into(), 0.into(), real(PAGE_WIDTH), real(PAGE_HEIGHT)],
            "Contents" => content_id,
            "Resources" => page_resources,
        });
        kids.push(Object::Reference(page_id));
    }
    let count = kids.len() as i64;
    doc.objects.insert(
        pages_id,
        Object::Dictionary(dictionary! {
            "Type" => "Pages",
            "Kids" => kids,
            "Count" => count,
        }),
    );
    let catalog_id = doc.add_object(dictionary! {
        "Type" => "Catalog",
        "Pages" => pages_id,
    });
    doc.trailer.set("Root", catalog_id);
    let mut out = Vec::new();
    doc.save_to(&mut out).expect("writing to memory succeeds");
    out
}
