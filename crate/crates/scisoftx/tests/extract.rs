use lopdf::{dictionary, Document, Object};
use scisoftx::extract::{extract_spans, ExtractError};
use scisoftx::synth::corpus::generate_document;
use scisoftx::synth::fixtures::fixture_suite;
use scisoftx::synth::pdf::{manifest, render_pdf, Face, LineStyle, PageLine, PageSpec, Segment};
use scisoftx_core::digest::sha256_hex;
use scisoftx_core::DocumentModel;

fn check_against_manifest(name: &str, pages: &[PageSpec]) {
    let pdf = render_pdf(pages);
    let doc = extract_spans(&pdf).unwrap_or_else(|e| panic!("{name}: {e}"));
    let m = manifest(pages);
    assert_eq!(doc.page_count, m.page_count, "{name}");
    assert_eq!(doc.source_digest, sha256_hex(&pdf), "{name}");
    let lines: Vec<_> = doc.lines().map(|l| (l[0].page, l[0].line)).collect();
    let expected: Vec<_> = m.lines.iter().map(|l| (l.page, l.line)).collect();
    assert_eq!(lines, expected, "{name}");
    for ml in &m.lines {
        let mono: Vec<&str> = doc
            .spans
            .iter()
            .filter(|s| (s.page, s.line) == (ml.page, ml.line) && s.font.is_monospace)
            .map(|s| s.text.as_str())
            .collect();
        assert_eq!(mono, ml.monospace, "{name} page {} line {}", ml.page, ml.line);
        assert_eq!(doc.line_text(ml.page, ml.line).as_deref(), Some(ml.text.as_str()), "{name}");
    }
}

#[test]
fn fixture_pdfs_match_their_manifests() {
    for (name, pages) in fixture_suite() {
        check_against_manifest(&name, &pages);
    }
}

#[test]
fn corpus_papers_match_their_manifests() {
    for n in 0..4 {
        let doc = generate_document(n, 7);
        check_against_manifest(&doc.name, &doc.pages);
    }
}

fn assert_monotone(doc: &DocumentModel) {
    for w in doc.spans.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        assert!(a.page <= b.page);
        if a.page == b.page {
            assert!(a.line <= b.line, "line numbers decrease on page {}", a.page);
            if a.line == b.line {
                assert!(a.char_end <= b.char_start, "spans overlap on page {} line {}", a.page, a.line);
            } else {
                assert!(a.bbox[1] > b.bbox[1], "a later line sits above an earlier one");
            }
        }
    }
}

#[test]
fn lines_are_numbered_top_down() {
    for (_, pages) in fixture_suite() {
        assert_monotone(&extract_spans(&render_pdf(&pages)).unwrap());
    }
}

#[test]
fn span_ids_are_sequential_and_model_validates() {
    let (_, pages) = &fixture_suite()[0];
    let doc = extract_spans(&render_pdf(pages)).unwrap();
    doc.validate().unwrap();
    for (i, s) in doc.spans.iter().enumerate() {
        assert_eq!(s.span_id.0 as usize, i);
    }
}

#[test]
fn fonts_are_reported_with_their_flags() {
    let pages = vec![PageSpec {
        lines: vec![PageLine::new(vec![
            Segment::new(Face::Times, "a "),
            Segment::new(Face::FlaggedFixed, "b"),
            Segment::new(Face::Times, " "),
            Segment::new(Face::Cmtt, "c"),
        ])],
        in_form: false,
    }];
    let doc = extract_spans(&render_pdf(&pages)).unwrap();
    let fonts: Vec<(&str, u32, bool)> = doc
        .spans
        .iter()
        .map(|s| (s.font.postscript_name.as_str(), s.font.flags, s.font.is_monospace))
        .collect();
    assert_eq!(
        fonts,
        [("Times-Roman", 34, false), ("GlyphCode-Regular", 33, true), ("Times-Roman", 34, false), ("CMTT10", 32, true)]
    );
    assert!(doc.spans.iter().all(|s| (s.font.size_pt - 10.0).abs() < 1e-6));
}

#[test]
fn kerned_and_gapped_lines_read_like_plain_ones() {
    let text = vec![Segment::new(Face::Times, "Calling "), Segment::new(Face::Courier, "a.b(c)"), Segment::new(Face::Times, " twice.")];
    let mut texts = Vec::new();
    for style in [LineStyle::Plain, LineStyle::Kerned, LineStyle::SpacesAsGaps] {
        let pages = vec![PageSpec {
            lines: vec![PageLine { segments: text.clone(), paragraph: false, style }],
            in_form: false,
        }];
        let doc = extract_spans(&render_pdf(&pages)).unwrap();
        texts.push(doc.line_text(1, 1).unwrap());
    }
    assert!(texts.iter().all(|t| t == "Calling a.b(c) twice."), "{texts:?}");
}

#[test]
fn garbage_is_malformed() {
    assert!(matches!(extract_spans(b"not a pdf"), Err(ExtractError::MalformedDocument(_))));
    assert!(matches!(extract_spans(b""), Err(ExtractError::MalformedDocument(_))));
    let pdf = render_pdf(&fixture_suite()[0].1);
    assert!(matches!(extract_spans(&pdf[..pdf.len() / 3]), Err(ExtractError::MalformedDocument(_))));
}

#[test]
fn encrypted_pdfs_are_refused() {
    let pdf = render_pdf(&fixture_suite()[0].1);
    let mut doc = Document::load_mem(&pdf).unwrap();
    let encrypt = doc.add_object(dictionary! {
        "Filter" => "Standard",
        "V" => 1,
        "R" => 2,
        "O" => Object::string_literal(vec![0u8; 32]),
        "U" => Object::string_literal(vec![0u8; 32]),
        "P" => -4,
    });
    doc.trailer.set("Encrypt", encrypt);
    let mut out = Vec::new();
    doc.save_to(&mut out).unwrap();
    assert!(matches!(extract_spans(&out), Err(ExtractError::EncryptedDocument)));
}

#[test]
fn extraction_is_deterministic() {
    let pdf = render_pdf(&fixture_suite()[5].1);
    assert_eq!(extract_spans(&pdf).unwrap(), extract_spans(&pdf).unwrap());
}
