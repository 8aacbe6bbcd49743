use scisoftx::evaluate::{evaluate_corpus, format_table};
use scisoftx::extract::extract_spans;
use scisoftx::formats::import_xml;
use scisoftx::repo::build_index;
use scisoftx::synth::corpus::{generate_document, write_corpus, Lang, DEFAULT_SEED};
use scisoftx_core::{LinkerParams, Profile};

#[test]
fn generation_is_deterministic() {
    let a = generate_document(3, DEFAULT_SEED);
    let b = generate_document(3, DEFAULT_SEED);
    assert_eq!(a.pdf, b.pdf);
    assert_eq!(a.gold, b.gold);
    assert_eq!(a.repo.files, b.repo.files);
    assert_ne!(generate_document(3, DEFAULT_SEED + 1).pdf, a.pdf);
}

#[test]
fn corpus_mixes_languages_and_pages() {
    let docs: Vec<_> = (0..8).map(|n| generate_document(n, DEFAULT_SEED)).collect();
    assert_eq!(docs.iter().filter(|d| d.lang == Lang::Java).count(), 4);
    assert!(docs.iter().all(|d| d.manifest.page_count >= 2));
    assert!(docs.iter().any(|d| d.pages.iter().any(|p| p.in_form)));
}

#[test]
fn gold_targets_exist_in_the_index() {
    let dir = tempfile::tempdir().unwrap();
    let names = write_corpus(dir.path(), 4, 3).unwrap();
    for name in names {
        let root = dir.path().join(&name);
        let gold = import_xml(&std::fs::read(root.join("gold.xml")).unwrap()).unwrap();
        let index = build_index(&root.join("repo"), &Profile::ALL.into_iter().collect()).unwrap();
        assert!(index.diagnostics().is_empty(), "{name}: {:?}", index.diagnostics());
        assert_eq!(gold.code_digest, index.source_digest());
        let doc = extract_spans(&std::fs::read(root.join("paper.pdf")).unwrap()).unwrap();
        assert_eq!(gold.document_digest, doc.source_digest);
        for link in gold.links() {
            let ids = &index.qname_map()[&link.target_qname];
            let e = index.entity(ids[0]).unwrap();
            assert_eq!((e.file_path.as_str(), e.line_start), (link.target_file.as_str(), link.target_line), "{name}");
            let line = doc.line_text(link.page, link.line).unwrap();
            let text: String = line.chars().skip(link.char_start as usize).take(link.snippet.chars().count()).collect();
            assert_eq!(text, link.snippet, "{name}");
        }
    }
}

#[test]
fn evaluation_skips_broken_documents() {
    let dir = tempfile::tempdir().unwrap();
    write_corpus(dir.path(), 2, 4).unwrap();
    std::fs::remove_file(dir.path().join("doc-02/gold.xml")).unwrap();
    let report = evaluate_corpus(dir.path(), &LinkerParams::default()).unwrap();
    assert_eq!(report.per_document.len(), 1);
    assert_eq!(report.skipped.len(), 1);
    assert_eq!(report.skipped[0].document, "doc-02");
    let table = format_table(&report);
    assert!(table.contains("skipped doc-02"));
    assert_eq!(report.tp, report.per_document[0].tp);
}
