//! Deterministic evaluation corpus: small Java and Python repositories, a
//! paper about each one with inline monospace mentions, and the gold links
//! the generator meant to write.
//!
//! Gold links record the author's intent for every mention, including the
//! cases the linker cannot get right: identifiers split by hyphenation,
//! ambiguous names mentioned without a helpful context, and monospace text
//! that only looks like code.

use std::fs;
use std::io;
use std::path::Path;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scisoftx_core::digest::{sha256_hex, tree_digest};
use scisoftx_core::links::link_id;
use scisoftx_core::{Label, Link, LinkSet, Origin};
use serde::Serialize;

use super::pdf::{manifest, render_pdf, Face, LineStyle, Manifest, PageLine, PageSpec, Segment};
use crate::formats::{export_xml, to_canonical_json};

pub const DEFAULT_SEED: u64 = 0x5C15_0F7E;
pub const DEFAULT_DOCUMENTS: usize = 8;

const MAX_LINE_CHARS: usize = 84;
const MAX_PAGE_LINES: usize = 24;

const CLASSES: &[&str] = &[
    "Parser", "Tokenizer", "Scanner", "Indexer", "Matcher", "Scorer", "Ranker", "Sampler", "Loader", "Encoder",
    "Decoder", "Registry", "Planner", "Solver", "Tracker", "Renderer", "Exporter", "Validator", "Scheduler",
    "Aggregator",
];
const METHODS: &[&str] = &[
    "parse", "load", "run", "update", "reset", "score", "merge", "flush", "encode", "decode", "build", "apply", "fit",
    "predict", "normalize", "validate", "evaluate", "render", "collect", "step",
];
const JAVA_FIELDS: &[&str] = &["capacity", "threshold", "maxDepth", "weights", "counter", "cache", "epsilon", "stride"];
const PY_FIELDS: &[&str] = &["capacity", "threshold", "max_depth", "weights", "counter", "cache", "epsilon", "stride"];
const PARAMS: &[&str] = &["input", "limit", "depth", "path", "items", "key", "value", "weight", "seed", "alpha"];
const FUNCTIONS: &[&str] = &[
    "load_config", "build_index", "run_pipeline", "export_results", "summarize", "make_batches", "seed_everything",
    "collect_stats",
];
const JAVA_PACKAGES: &[&str] = &["core", "io", "model", "util", "text", "graph", "search", "stats"];
const PY_PACKAGES: &[&str] = &["core", "io", "models", "utils", "text", "metrics"];
const JAVA_PROJECTS: &[&str] = &["lumen", "quarry", "tessera", "orbit"];
const PY_PROJECTS: &[&str] = &["sketch", "fathom", "meridian", "kestrel"];
const MONO_FACES: [Face; 4] = [Face::Courier, Face::Cmtt, Face::LmMono, Face::FlaggedFixed];

const CLASS_PHRASES: &[&str] = &[
    "class implements the central loop of the system.",
    "class owns the state shared by all workers.",
    "class is the entry point for every experiment in this paper.",
    "class wraps the input data and exposes it in batches.",
    "class keeps track of intermediate results between runs.",
];
const METHOD_PHRASES: &[&str] = &[
    "method is invoked once for every item in the batch.",
    "method performs the expensive part of the computation.",
    "method is where most of the running time goes.",
    "method is called again whenever the configuration changes.",
];
const QUALIFIED_PHRASES: &[&str] = &[
    "is the only call that touches the disk.",
    "returns the partial result described above.",
    "is applied after the preprocessing stage has finished.",
];
const PARAM_PHRASES: &[&str] = &[
    "argument bounds the amount of work per call.",
    "argument is taken directly from the configuration file.",
    "argument controls the trade-off discussed in the evaluation.",
];
const FIELD_PHRASES: &[&str] = &[
    "stores the value learned during the first pass.",
    "is reset at the start of each epoch.",
    "keeps the setting chosen by the user.",
];
const FILLER: &[&str] = &[
    "We evaluate the approach on three public datasets and report the mean over five runs.",
    "The remaining components follow the design of earlier systems and are not discussed further.",
    "All experiments were run on a single workstation with sixteen cores.",
    "This section describes the implementation in more detail.",
    "Related work has mostly focused on the modelling side of the problem.",
    "The full source code accompanies this paper and is released under an open license.",
];
const NON_CODE: &[&str] = &[
    "results.csv", "config.yaml", "README.md", "https://example.org/artifact", "make all", "-Xmx4g", "$HOME/data",
    "UTF-8", "x86_64", "v1.2.0",
];
const JAVA_LIBRARY: &[&str] = &["java.util.List", "Math.max", "System.nanoTime()", "HashMap"];
const PY_LIBRARY: &[&str] = &["numpy.mean", "os.path.join", "json.dumps()", "argparse"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Lang {
    Java,
    Python,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthKind {
    Class,
    Method,
    Function,
    Field,
    Param,
}

/// A declaration the generator wrote, with the qualified name the indexer is
/// expected to give it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SynthEntity {
    pub qname: String,
    pub name: String,
    pub file: String,
    pub line: u32,
    pub kind: SynthKind,
    pub parent: Option<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct SynthRepo {
    pub files: Vec<(String, String)>,
    pub entities: Vec<SynthEntity>,
    /// Method bodies as written, for code listings: (entity, source lines).
    listings: Vec<(usize, Vec<String>)>,
}

impl SynthRepo {
    fn add(&mut self, qname: String, name: &str, file: &str, line: u32, kind: SynthKind, parent: Option<usize>) -> usize {
        self.entities.push(SynthEntity {
            qname,
            name: name.into(),
            file: file.into(),
            line,
            kind,
            parent,
        });
        self.entities.len() - 1
    }

    fn of_kind(&self, kind: SynthKind) -> Vec<usize> {
        (0..self.entities.len()).filter(|&i| self.entities[i].kind == kind).collect()
    }

    fn children(&self, parent: usize, kind: SynthKind) -> Vec<usize> {
        (0..self.entities.len())
            .filter(|&i| self.entities[i].parent == Some(parent) && self.entities[i].kind == kind)
            .collect()
    }

    pub fn code_digest(&self) -> String {
        let hashes: Vec<(String, String)> = self
            .files
            .iter()
            .map(|(p, c)| (p.clone(), sha256_hex(c.as_bytes())))
            .collect();
        tree_digest(hashes.iter().map(|(p, h)| (p.as_str(), h.as_str())))
    }
}

/// Line-numbered text buffer.
#[derive(Default)]
struct Source {
    lines: Vec<String>,
}

impl Source {
    fn push(&mut self, line: impl Into<String>) -> u32 {
        self.lines.push(line.into());
        self.lines.len() as u32
    }

    fn finish(self) -> String {
        let mut s = self.lines.join("\n");
        s.push('\n');
        s
    }
}

fn pick<'a, T>(rng: &mut ChaCha8Rng, items: &'a [T]) -> &'a T {
    items.choose(rng).expect("non-empty vocabulary")
}

fn sample<T: Clone>(rng: &mut ChaCha8Rng, items: &[T], n: usize) -> Vec<T> {
    items.choose_multiple(rng, n).cloned().collect()
}

fn java_type(rng: &mut ChaCha8Rng) -> &'static str {
    pick(rng, &["int", "String", "double", "long"])
}

fn java_repo(rng: &mut ChaCha8Rng) -> SynthRepo {
    let mut repo = SynthRepo::default();
    let project = *pick(rng, JAVA_PROJECTS);
    let packages = sample(rng, JAVA_PACKAGES, 3);
    let classes = sample(rng, CLASSES, 6);
    for (i, class) in classes.iter().enumerate() {
        let package = packages[i / 2];
        let dotted = format!("org.{project}.{package}");
        let path = format!("src/main/java/org/{project}/{package}/{class}.java");
        let mut src = Source::default();
        src.push(format!("package {dotted};"));
        src.push("");
        src.push("import java.util.List;");
        src.push("");
        src.push("/**");
        src.push(format!(" * {class} for the {package} layer."));
        src.push(" */");
        let class_line = src.push(format!("public class {class} {{"));
        let class_q = format!("{dotted}.{class}.{class}");
        let c = repo.add(class_q.clone(), class, &path, class_line, SynthKind::Class, None);
        for field in { let n = rng.random_range(1..=2); sample(rng, JAVA_FIELDS, n) } {
            let ty = java_type(rng);
            let line = src.push(format!("    private {ty} {field};"));
            repo.add(format!("{class_q}.{field}"), field, &path, line, SynthKind::Field, Some(c));
        }
        for method in { let n = rng.random_range(3..=4); sample(rng, METHODS, n) } {
            src.push("");
            let params = { let n = rng.random_range(1..=2); sample(rng, PARAMS, n) };
            let sig: Vec<String> = params.iter().map(|p| format!("{} {p}", java_type(rng))).collect();
            let first = src.lines.len();
            let line = src.push(format!("    public int {method}({}) {{", sig.join(", ")));
            let m = repo.add(format!("{class_q}.{method}"), method, &path, line, SynthKind::Method, Some(c));
            for p in &params {
                repo.add(format!("{class_q}.{method}.{p}"), p, &path, line, SynthKind::Param, Some(m));
            }
            src.push("        int acc = 0;");
            src.push("        for (int k = 0; k < 3; k++) {");
            src.push("            acc += k;");
            src.push("        }");
            src.push("        return acc;");
            src.push("    }");
            repo.listings.push((m, src.lines[first..first + 5].to_vec()));
        }
        src.push("}");
        repo.files.push((path, src.finish()));
    }
    repo
}

fn python_repo(rng: &mut ChaCha8Rng) -> SynthRepo {
    let mut repo = SynthRepo::default();
    let project = *pick(rng, PY_PROJECTS);
    let packages = sample(rng, PY_PACKAGES, 2);
    let classes = sample(rng, CLASSES, 4);
    let functions = sample(rng, FUNCTIONS, 4);
    repo.files.push((format!("{project}/__init__.py"), String::new()));
    for package in &packages {
        repo.files.push((format!("{project}/{package}/__init__.py"), String::new()));
    }
    for (i, class) in classes.iter().enumerate() {
        let package = packages[i / 2];
        let module = class.to_ascii_lowercase();
        let path = format!("{project}/{package}/{module}.py");
        let module_q = format!("{project}.{package}.{module}");
        let mut src = Source::default();
        src.push(format!("\"\"\"{class} for the {package} layer.\"\"\""));
        src.push("");
        src.push("import math");
        src.push("");
        src.push("");
        let class_line = src.push(format!("class {class}:"));
        let class_q = format!("{module_q}.{class}");
        let c = repo.add(class_q.clone(), class, &path, class_line, SynthKind::Class, None);
        src.push(format!("    \"\"\"{class} implementation.\"\"\""));
        src.push("");
        let fields = { let n = rng.random_range(1..=2); sample(rng, PY_FIELDS, n) };
        src.push(format!("    def __init__(self, {}):", fields.join(", ")));
        for f in &fields {
            let line = src.push(format!("        self.{f} = {f}"));
            repo.add(format!("{class_q}.{f}"), f, &path, line, SynthKind::Field, Some(c));
        }
        for method in { let n = rng.random_range(3..=4); sample(rng, METHODS, n) } {
            src.push("");
            let params = { let n = rng.random_range(1..=2); sample(rng, PARAMS, n) };
            let first = src.lines.len();
            let line = src.push(format!("    def {method}(self, {}):", params.join(", ")));
            let m = repo.add(format!("{class_q}.{method}"), method, &path, line, SynthKind::Method, Some(c));
            for p in &params {
                repo.add(format!("{class_q}.{method}.{p}"), p, &path, line, SynthKind::Param, Some(m));
            }
            src.push("        acc = 0");
            src.push(format!("        for k in range({}):", params[0].len()));
            src.push("            acc += k");
            src.push("        return acc");
            repo.listings.push((m, src.lines[first..first + 5].to_vec()));
        }
        let function = functions[i];
        src.push("");
        src.push("");
        let param = *pick(rng, PARAMS);
        let line = src.push(format!("def {function}({param}):"));
        let f = repo.add(format!("{module_q}.{function}"), function, &path, line, SynthKind::Function, None);
        repo.add(format!("{module_q}.{function}.{param}"), param, &path, line, SynthKind::Param, Some(f));
        src.push(format!("    return {param}"));
        repo.files.push((path, src.finish()));
    }
    repo
}

/// One piece of a word: text in one face, optionally a mention with a gold target.
#[derive(Debug, Clone)]
struct Piece {
    face: Face,
    text: String,
    target: Option<usize>,
}

/// Pieces printed without spaces between them.
#[derive(Debug, Clone)]
struct Word {
    pieces: Vec<Piece>,
    /// Hyphenate this mention across a line break.
    split: bool,
}

impl Word {
    fn len(&self) -> usize {
        self.pieces.iter().map(|p| p.text.len()).sum()
    }
}

enum Block {
    Prose(Vec<Word>),
    Listing(Vec<String>),
    Display(Word),
}

struct Writer<'r> {
    repo: &'r SynthRepo,
    mono: Face,
    words: Vec<Word>,
}

impl Writer<'_> {
    fn text(&mut self, s: &str) {
        for w in s.split_whitespace() {
            self.words.push(Word {
                pieces: vec![Piece { face: Face::Times, text: w.into(), target: None }],
                split: false,
            });
        }
    }

    /// A monospace mention, with optional trailing body-text punctuation.
    fn code(&mut self, text: impl Into<String>, target: Option<usize>, trailing: &str) {
        let mut pieces = vec![Piece { face: self.mono, text: text.into(), target }];
        if !trailing.is_empty() {
            pieces.push(Piece { face: Face::Times, text: trailing.into(), target: None });
        }
        self.words.push(Word { pieces, split: false });
    }

    fn name(&self, e: usize) -> &str {
        &self.repo.entities[e].name
    }

    fn take(&mut self) -> Block {
        Block::Prose(std::mem::take(&mut self.words))
    }
}

fn class_paragraph(w: &mut Writer<'_>, rng: &mut ChaCha8Rng, class: usize) {
    let repo = w.repo;
    let methods = repo.children(class, SynthKind::Method);
    let fields = repo.children(class, SynthKind::Field);
    let class_name = w.name(class).to_string();
    w.text("The");
    w.code(class_name.clone(), Some(class), "");
    w.text(pick(rng, CLASS_PHRASES));

    let mut steps = vec![0, 1, 2, 3];
    steps.shuffle(rng);
    steps.truncate(rng.random_range(2..=4));
    for step in steps {
        match step {
            0 => {
                let m = *pick(rng, &methods);
                w.text("Its");
                let name = format!("{}()", w.name(m));
                w.code(name, Some(m), "");
                w.text(pick(rng, METHOD_PHRASES));
            }
            1 => {
                let m = *pick(rng, &methods);
                let params = repo.children(m, SynthKind::Param);
                let shown = format!("{class_name}.{}({})", w.name(m), w.name(params[0]));
                w.text("The call");
                w.code(shown, Some(m), "");
                w.text(pick(rng, QUALIFIED_PHRASES));
                let p = *pick(rng, &params);
                w.text("The");
                let pn = w.name(p).to_string();
                w.code(pn, Some(p), "");
                w.text("argument of");
                let mn = w.name(m).to_string();
                w.code(mn, Some(m), "");
                w.text(pick(rng, PARAM_PHRASES));
            }
            2 if !fields.is_empty() => {
                let f = *pick(rng, &fields);
                w.text("The field");
                let name = w.name(f).to_string();
                w.code(name, Some(f), "");
                w.text(pick(rng, FIELD_PHRASES));
            }
            _ => {
                let m = *pick(rng, &methods);
                w.text("Calling");
                let name = format!("{}.{}()", class_name, w.name(m));
                w.code(name, Some(m), "");
                w.text("twice has no further effect.");
            }
        }
    }
}

/// The generated paper plus everything needed to score and check it.
pub struct GeneratedDocument {
    pub name: String,
    pub lang: Lang,
    pub repo: SynthRepo,
    pub pages: Vec<PageSpec>,
    pub pdf: Vec<u8>,
    pub manifest: Manifest,
    pub gold: LinkSet,
}

pub fn generate_document(number: usize, seed: u64) -> GeneratedDocument {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (number as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let lang = if number % 2 == 0 { Lang::Java } else { Lang::Python };
    let repo = match lang {
        Lang::Java => java_repo(&mut rng),
        Lang::Python => python_repo(&mut rng),
    };
    let mono = MONO_FACES[number % MONO_FACES.len()];
    let mut w = Writer { repo: &repo, mono, words: Vec::new() };
    let mut blocks = Vec::new();

    w.text(pick(&mut rng, FILLER));
    w.text(pick(&mut rng, FILLER));
    blocks.push(w.take());

    let mut classes = repo.of_kind(SynthKind::Class);
    classes.shuffle(&mut rng);
    classes.truncate(4);
    let listing_after = rng.random_range(0..classes.len());
    let display_after = (listing_after + 1) % classes.len();
    for (i, &class) in classes.iter().enumerate() {
        class_paragraph(&mut w, &mut rng, class);
        blocks.push(w.take());
        if i == listing_after {
            let methods = repo.children(class, SynthKind::Method);
            let m = *pick(&mut rng, &methods);
            let listing = repo.listings.iter().find(|(e, _)| *e == m).expect("every method has a listing");
            w.text("The listing below shows the body of");
            let name = w.name(m).to_string();
            w.code(name, Some(m), ".");
            blocks.push(w.take());
            blocks.push(Block::Listing(listing.1.clone()));
        }
        if i == display_after {
            let methods = repo.children(class, SynthKind::Method);
            let m = *pick(&mut rng, &methods);
            let params: Vec<String> = repo
                .children(m, SynthKind::Param)
                .iter()
                .map(|&p| repo.entities[p].name.clone())
                .collect();
            w.text("Each worker repeatedly evaluates");
            blocks.push(w.take());
            let text = format!("{}.{}({})", repo.entities[class].name, w.name(m), params.join(", "));
            blocks.push(Block::Display(Word {
                pieces: vec![Piece { face: mono, text, target: Some(m) }],
                split: false,
            }));
        }
    }

    // A name shared by several classes, mentioned with no helpful context.
    let methods = repo.of_kind(SynthKind::Method);
    let shared: Vec<usize> = methods
        .iter()
        .copied()
        .filter(|&m| methods.iter().filter(|&&o| repo.entities[o].name == repo.entities[m].name).count() > 1)
        .collect();
    w.text(pick(&mut rng, FILLER));
    if let Some(&m) = shared.choose(&mut rng) {
        w.text("Finally,");
        let name = format!("{}()", w.name(m));
        w.code(name, Some(m), "");
        w.text("is called once per epoch.");
    }
    let params = repo.of_kind(SynthKind::Param);
    let flag = format!("--{}", repo.entities[*pick(&mut rng, &params)].name);
    w.text("Users can override the default with");
    w.code(flag, None, "");
    w.text("on the command line.");
    blocks.push(w.take());

    let nc = sample(&mut rng, NON_CODE, 2);
    w.text("All results are written to");
    w.code(nc[0], None, "");
    w.text("and the setup is described in");
    w.code(nc[1], None, ".");
    let library = if lang == Lang::Java { JAVA_LIBRARY } else { PY_LIBRARY };
    w.text("We rely on");
    w.code(*pick(&mut rng, library), None, "");
    w.text("for the numerical parts.");
    let long: Vec<usize> = repo
        .of_kind(SynthKind::Class)
        .into_iter()
        .filter(|&c| repo.entities[c].name.len() >= 7)
        .collect();
    if let Some(&c) = long.choose(&mut rng) {
        w.text(pick(&mut rng, FILLER));
        w.text("A single");
        let name = w.name(c).to_string();
        w.code(name, Some(c), "");
        w.words.last_mut().expect("just pushed").split = true;
        w.text("instance is shared by all threads.");
    }
    w.text(pick(&mut rng, FILLER));
    blocks.push(w.take());

    let pages = layout(blocks, &mut rng, number);
    let pdf = render_pdf(&pages.iter().map(|p| p.spec.clone()).collect::<Vec<_>>());
    let specs: Vec<PageSpec> = pages.iter().map(|p| p.spec.clone()).collect();
    let document_digest = sha256_hex(&pdf);
    let mut links = Vec::new();
    for (p, page) in pages.iter().enumerate() {
        for m in &page.mentions {
            let e = &repo.entities[m.target];
            links.push(Link {
                link_id: link_id(p as u32 + 1, m.line, m.start, m.end, &e.qname),
                page: p as u32 + 1,
                line: m.line,
                char_start: m.start,
                char_end: m.end,
                snippet: m.text.clone(),
                target_qname: e.qname.clone(),
                target_file: e.file.clone(),
                target_line: e.line,
                label: Label::Mentions,
                origin: Origin::Manual,
                score: 0,
            });
        }
    }
    let gold = LinkSet::from_links(document_digest, repo.code_digest(), links).expect("generated gold links are valid");
    GeneratedDocument {
        name: format!("doc-{:02}", number + 1),
        lang,
        manifest: manifest(&specs),
        pages: specs,
        pdf,
        repo,
        gold,
    }
}

struct PlacedMention {
    line: u32,
    start: u32,
    end: u32,
    text: String,
    target: usize,
}

struct LaidOutPage {
    spec: PageSpec,
    mentions: Vec<PlacedMention>,
}

struct Layout {
    pages: Vec<LaidOutPage>,
    style_rng: ChaCha8Rng,
}

impl Layout {
    fn page(&mut self) -> &mut LaidOutPage {
        self.pages.last_mut().expect("layout starts with a page")
    }

    fn room(&self) -> usize {
        MAX_PAGE_LINES - self.pages.last().expect("layout starts with a page").spec.lines.len()
    }

    fn new_page(&mut self) {
        self.pages.push(LaidOutPage { spec: PageSpec::default(), mentions: Vec::new() });
    }

    fn style(&mut self) -> LineStyle {
        match self.style_rng.random_range(0..10) {
            0..=5 => LineStyle::Plain,
            6 | 7 => LineStyle::Kerned,
            _ => LineStyle::SpacesAsGaps,
        }
    }

    /// Emits one line built from words separated by body-text spaces.
    fn line(&mut self, words: &[Word], paragraph: bool) {
        if self.room() == 0 {
            self.new_page();
        }
        let style = self.style();
        let line_no = self.page().spec.lines.len() as u32 + 1;
        let mut segments: Vec<Segment> = Vec::new();
        let mut offset = 0u32;
        let mut mentions = Vec::new();
        for (i, word) in words.iter().enumerate() {
            if i > 0 {
                segments.push(Segment::new(Face::Times, " "));
                offset += 1;
            }
            for piece in &word.pieces {
                let len = piece.text.chars().count() as u32;
                if let Some(target) = piece.target {
                    mentions.push(PlacedMention {
                        line: line_no,
                        start: offset,
                        end: offset + len,
                        text: piece.text.clone(),
                        target,
                    });
                }
                segments.push(Segment::new(piece.face, piece.text.clone()));
                offset += len;
            }
        }
        let page = self.page();
        page.spec.lines.push(PageLine { segments, paragraph, style });
        page.mentions.extend(mentions);
    }
}

/// Splits a one-piece mention into a hyphenated head and the remaining tail.
fn hyphenate(word: &Word) -> (Word, Word) {
    let piece = &word.pieces[0];
    let cut = piece.text.len() * 2 / 3;
    let head = Word {
        pieces: vec![Piece { face: piece.face, text: format!("{}-", &piece.text[..cut]), target: piece.target }],
        split: false,
    };
    let mut tail_pieces = vec![Piece { face: piece.face, text: piece.text[cut..].into(), target: None }];
    tail_pieces.extend(word.pieces[1..].iter().cloned());
    (head, Word { pieces: tail_pieces, split: false })
}

fn layout(blocks: Vec<Block>, rng: &mut ChaCha8Rng, number: usize) -> Vec<LaidOutPage> {
    let mut l = Layout {
        pages: Vec::new(),
        style_rng: ChaCha8Rng::seed_from_u64(rng.random()),
    };
    l.new_page();
    let title = format!("A Study of Software Artefact {}", number + 1);
    l.page().spec.lines.push(PageLine {
        segments: vec![Segment::new(Face::Helvetica, title)],
        paragraph: false,
        style: LineStyle::Plain,
    });
    for block in blocks {
        match block {
            Block::Prose(words) => {
                let mut current: Vec<Word> = Vec::new();
                let mut width = 0;
                let mut first = true;
                let mut queue: std::collections::VecDeque<Word> = words.into();
                while let Some(word) = queue.pop_front() {
                    if word.split {
                        let (head, tail) = hyphenate(&word);
                        current.push(head);
                        l.line(&current, first);
                        first = false;
                        current.clear();
                        width = 0;
                        queue.push_front(tail);
                        continue;
                    }
                    let extra = word.len() + usize::from(!current.is_empty());
                    if width + extra > MAX_LINE_CHARS && !current.is_empty() {
                        l.line(&current, first);
                        first = false;
                        current.clear();
                        width = 0;
                    }
                    width += word.len() + usize::from(!current.is_empty());
                    current.push(word);
                }
                if !current.is_empty() {
                    l.line(&current, first);
                }
            }
            Block::Listing(lines) => {
                if l.room() < lines.len() {
                    l.new_page();
                }
                for (i, text) in lines.iter().enumerate() {
                    let word = Word {
                        pieces: vec![Piece { face: Face::Courier, text: text.clone(), target: None }],
                        split: false,
                    };
                    l.line(&[word], i == 0);
                }
            }
            Block::Display(word) => {
                let indent = Word {
                    pieces: vec![Piece { face: Face::Times, text: "   ".into(), target: None }],
                    split: false,
                };
                let mut pieces = indent.pieces;
                pieces.extend(word.pieces);
                l.line(&[Word { pieces, split: false }], true);
            }
        }
    }
    for (i, page) in l.pages.iter_mut().enumerate() {
        page.spec.in_form = i == 1 && number % 2 == 0;
    }
    l.pages
}

/// Writes `count` documents under `dir`, each as
/// `<name>/{paper.pdf, repo/, gold.xml, manifest.json}`. Returns the names.
pub fn write_corpus(dir: &Path, count: usize, seed: u64) -> io::Result<Vec<String>> {
    fs::create_dir_all(dir)?;
    let mut names = Vec::new();
    for n in 0..count {
        let doc = generate_document(n, seed);
        write_document(&dir.join(&doc.name), &doc)?;
        names.push(doc.name);
    }
    Ok(names)
}

pub fn write_document(dir: &Path, doc: &GeneratedDocument) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("paper.pdf"), &doc.pdf)?;
    fs::write(dir.join("gold.xml"), export_xml(&doc.gold))?;
    fs::write(dir.join("manifest.json"), to_canonical_json(&doc.manifest))?;
    let repo = dir.join("repo");
    for (path, content) in &doc.repo.files {
        let target = repo.join(path);
        if let Some(parent) = target.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(target, content)?;
    }
    Ok(())
}
