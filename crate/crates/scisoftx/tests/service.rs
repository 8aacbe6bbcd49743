mod common;

use std::path::Path;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use scisoftx::config::ProjectConfig;
use scisoftx::formats::import_xml;
use scisoftx::service::{router, AppState};
use scisoftx::synth::corpus::{generate_document, write_document};
use serde_json::{json, Value};
use tower::ServiceExt;

struct Fixture {
    dir: tempfile::TempDir,
    state: AppState,
    app: Router,
}

fn config(d: &Path) -> ProjectConfig {
    ProjectConfig {
        pdf_path: Some(d.join("paper.pdf")),
        repo_path: Some(d.join("repo")),
        links_path: Some(d.join("links.xml")),
        ..ProjectConfig::default()
    }
}

fn fixture() -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    write_document(dir.path(), &generate_document(1, 9)).unwrap();
    let state = AppState::load(&config(dir.path()), None).unwrap();
    Fixture {
        app: router(state.clone()),
        state,
        dir,
    }
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Vec<u8>) {
    let mut req = Request::builder().method(method).uri(uri);
    let body = match body {
        Some(v) => {
            req = req.header("content-type", "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let res = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = res.status();
    (status, res.into_body().collect().await.unwrap().to_bytes().to_vec())
}

async fn call_json(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let (status, bytes) = call(app, method, uri, body).await;
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

fn assert_error(status: StatusCode, body: &Value, expected: StatusCode, code: &str) {
    assert_eq!(status, expected, "{body}");
    assert_eq!(body["code"], code);
    assert!(body["message"].as_str().is_some_and(|m| !m.is_empty()));
}

#[tokio::test]
async fn document_and_code_endpoints() {
    let f = fixture();
    let (status, doc) = call_json(&f.app, Method::GET, "/api/document", None).await;
    assert_eq!(status, StatusCode::OK);
    common::check_document_json(&doc).unwrap();

    let (status, raw) = call(&f.app, Method::GET, "/api/document/raw", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(raw, std::fs::read(f.dir.path().join("paper.pdf")).unwrap());

    let (status, index) = call_json(&f.app, Method::GET, "/api/code/entities", None).await;
    assert_eq!(status, StatusCode::OK);
    common::check_index_json(&index).unwrap();
    let file = index["entities"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["kind"] == "file" && e["file_path"].as_str().unwrap().ends_with(".py") && e["line_end"].as_u64() > Some(1))
        .unwrap()["file_path"]
        .as_str()
        .unwrap()
        .to_string();
    let (status, source) = call(&f.app, Method::GET, &format!("/api/code/source?file={file}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(source, std::fs::read(f.dir.path().join("repo").join(&file)).unwrap());

    let (status, body) = call_json(&f.app, Method::GET, "/api/code/source", None).await;
    assert_error(status, &body, StatusCode::BAD_REQUEST, "MissingParameter");
    let (status, body) = call_json(&f.app, Method::GET, "/api/code/source?file=../paper.pdf", None).await;
    assert_error(status, &body, StatusCode::NOT_FOUND, "UnknownFile");
}

#[tokio::test]
async fn auto_linking_is_idempotent() {
    let f = fixture();
    let (_, before) = call_json(&f.app, Method::GET, "/api/links", None).await;
    assert_eq!(before["links"].as_array().unwrap().len(), 0);
    let (status, first) = call_json(&f.app, Method::POST, "/api/links/auto", None).await;
    assert_eq!(status, StatusCode::OK);
    let (_, after_first) = call_json(&f.app, Method::GET, "/api/links", None).await;
    let (_, second) = call_json(&f.app, Method::POST, "/api/links/auto", None).await;
    let (_, after_second) = call_json(&f.app, Method::GET, "/api/links", None).await;
    assert_eq!(first, second);
    assert_eq!(after_first, after_second);
    assert!(first["auto"].as_u64().unwrap() > 0);
}

fn first_auto(links: &Value) -> Value {
    links["links"].as_array().unwrap().iter().find(|l| l["origin"] == "auto").unwrap().clone()
}

#[tokio::test]
async fn manual_links_can_be_added_and_removed() {
    let f = fixture();
    call(&f.app, Method::POST, "/api/links/auto", None).await;
    let (_, links) = call_json(&f.app, Method::GET, "/api/links", None).await;
    let auto = first_auto(&links);
    let new = json!({
        "page": auto["page"],
        "line": auto["line"],
        "char_start": auto["char_start"],
        "char_end": auto["char_end"],
        "target_qname": auto["target_qname"],
        "label": "uses",
    });
    let (status, created) = call_json(&f.app, Method::POST, "/api/links", Some(new.clone())).await;
    assert_eq!(status, StatusCode::CREATED, "{created}");
    assert_eq!(created["origin"], "manual");
    assert_eq!(created["snippet"], auto["snippet"]);
    assert_eq!(created["link_id"], auto["link_id"]);

    let (status, body) = call_json(&f.app, Method::POST, "/api/links", Some(new.clone())).await;
    assert_error(status, &body, StatusCode::CONFLICT, "DuplicateLink");

    call(&f.app, Method::POST, "/api/links/auto", None).await;
    let (_, links) = call_json(&f.app, Method::GET, "/api/links", None).await;
    let kept = links["links"].as_array().unwrap().iter().find(|l| l["link_id"] == created["link_id"]).unwrap();
    assert_eq!(kept["origin"], "manual");
    assert_eq!(kept["label"], "uses");

    let id = created["link_id"].as_str().unwrap();
    let (status, _) = call(&f.app, Method::DELETE, &format!("/api/links/{id}"), None).await;
    assert_eq!(status, StatusCode::NO_CONTENT);
    let (status, body) = call_json(&f.app, Method::DELETE, &format!("/api/links/{id}"), None).await;
    assert_error(status, &body, StatusCode::NOT_FOUND, "UnknownLink");
}

#[tokio::test]
async fn bad_link_requests_are_rejected() {
    let f = fixture();
    let base = json!({"page": 1, "line": 2, "char_start": 0, "char_end": 3, "target_qname": "nope.Nothing"});
    let (status, body) = call_json(&f.app, Method::POST, "/api/links", Some(base.clone())).await;
    assert_error(status, &body, StatusCode::BAD_REQUEST, "UnknownTarget");

    let (_, index) = call_json(&f.app, Method::GET, "/api/code/entities", None).await;
    let qname = index["entities"].as_array().unwrap().iter().find(|e| e["kind"] == "type_def").unwrap()["qualified_name"].clone();
    let mut bad_label = base.clone();
    bad_label["target_qname"] = qname.clone();
    bad_label["label"] = "cites".into();
    let (status, body) = call_json(&f.app, Method::POST, "/api/links", Some(bad_label)).await;
    assert_error(status, &body, StatusCode::BAD_REQUEST, "InvalidLabel");

    let mut out_of_range = base.clone();
    out_of_range["target_qname"] = qname;
    out_of_range["char_end"] = 5000.into();
    let (status, body) = call_json(&f.app, Method::POST, "/api/links", Some(out_of_range)).await;
    assert_error(status, &body, StatusCode::BAD_REQUEST, "InvalidLink");

    let (status, body) = call_json(&f.app, Method::POST, "/api/links", Some(json!({"page": "one"}))).await;
    assert_error(status, &body, StatusCode::BAD_REQUEST, "InvalidRequest");

    let (status, body) = call_json(&f.app, Method::GET, "/api/graph?level=module", None).await;
    assert_error(status, &body, StatusCode::BAD_REQUEST, "InvalidLevel");
    let (status, body) = call_json(&f.app, Method::GET, "/api/nothing", None).await;
    assert_error(status, &body, StatusCode::NOT_FOUND, "UnknownRoute");
}

#[tokio::test]
async fn graphs_follow_the_links() {
    let f = fixture();
    call(&f.app, Method::POST, "/api/links/auto", None).await;
    let (_, links) = call_json(&f.app, Method::GET, "/api/links", None).await;
    let n = links["links"].as_array().unwrap().len() as u64;
    for level in ["file", "package"] {
        let (status, g) = call_json(&f.app, Method::GET, &format!("/api/graph?level={level}"), None).await;
        assert_eq!(status, StatusCode::OK);
        common::check_graph_json(&g).unwrap();
        assert_eq!(g["level"], level);
        let total: u64 = g["edges"].as_array().unwrap().iter().map(|e| e["weight"].as_u64().unwrap()).sum();
        assert_eq!(total, n);
    }
}

#[tokio::test]
async fn export_and_flush_write_the_link_file() {
    let f = fixture();
    let path = f.dir.path().join("links.xml");
    assert!(!f.state.flush().await.unwrap());
    call(&f.app, Method::POST, "/api/links/auto", None).await;
    assert!(!path.exists());
    let (status, body) = call_json(&f.app, Method::POST, "/api/export", None).await;
    assert_eq!(status, StatusCode::OK);
    let exported = import_xml(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(body["links"].as_u64().unwrap() as usize, exported.len());
    assert!(!f.state.flush().await.unwrap());

    let id = exported.links()[0].link_id.clone();
    call(&f.app, Method::DELETE, &format!("/api/links/{id}"), None).await;
    assert!(f.state.flush().await.unwrap());
    let flushed = import_xml(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(flushed.len(), exported.len() - 1);

    let reloaded = router(AppState::load(&config(f.dir.path()), None).unwrap());
    let (_, links) = call_json(&reloaded, Method::GET, "/api/links", None).await;
    assert_eq!(links["links"].as_array().unwrap().len(), flushed.len());
}

#[tokio::test]
async fn concurrent_mutations_are_serialized() {
    let f = fixture();
    call(&f.app, Method::POST, "/api/links/auto", None).await;
    let (_, links) = call_json(&f.app, Method::GET, "/api/links", None).await;
    let auto = first_auto(&links);
    let new = json!({
        "page": auto["page"], "line": auto["line"], "char_start": auto["char_start"],
        "char_end": auto["char_end"], "target_qname": auto["target_qname"],
    });
    let tasks: Vec<_> = (0..16)
        .map(|_| {
            let app = f.app.clone();
            let body = new.clone();
            tokio::spawn(async move { call(&app, Method::POST, "/api/links", Some(body)).await.0 })
        })
        .collect();
    let mut statuses = Vec::new();
    for t in tasks {
        statuses.push(t.await.unwrap());
    }
    assert_eq!(statuses.iter().filter(|s| **s == StatusCode::CREATED).count(), 1);
    assert_eq!(statuses.iter().filter(|s| **s == StatusCode::CONFLICT).count(), 15);
}

#[tokio::test]
async fn static_assets_and_fallback_page() {
    let f = fixture();
    let (status, page) = call(&f.app, Method::GET, "/", None).await;
    assert_eq!(status, StatusCode::OK);
    assert!(String::from_utf8(page).unwrap().contains("<html"));

    let assets = tempfile::tempdir().unwrap();
    std::fs::write(assets.path().join("index.html"), "<html>explorer</html>").unwrap();
    std::fs::write(assets.path().join("app.js"), "console.log(1)").unwrap();
    let app = router(AppState::load(&config(f.dir.path()), Some(assets.path().to_path_buf())).unwrap());
    assert_eq!(call(&app, Method::GET, "/app.js", None).await.1, b"console.log(1)");
    assert_eq!(call(&app, Method::GET, "/links/view", None).await.1, b"<html>explorer</html>");
    assert_eq!(call(&app, Method::GET, "/../Cargo.toml", None).await.1, b"<html>explorer</html>");
}

#[tokio::test]
async fn foreign_link_files_are_refused() {
    let f = fixture();
    let other = tempfile::tempdir().unwrap();
    write_document(other.path(), &generate_document(2, 9)).unwrap();
    let mut cfg = config(f.dir.path());
    cfg.links_path = Some(other.path().join("gold.xml"));
    assert!(AppState::load(&cfg, None).is_err());
    cfg.links_path = Some(f.dir.path().join("gold.xml"));
    let app = router(AppState::load(&cfg, None).unwrap());
    let (_, links) = call_json(&app, Method::GET, "/api/links", None).await;
    assert!(!links["links"].as_array().unwrap().is_empty());
}
