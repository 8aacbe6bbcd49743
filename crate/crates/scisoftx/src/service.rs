//! HTTP API over one document, one code index and one link set.

use std::net::SocketAddr;
use std::path::{Component, Path, PathBuf};
use std::sync::Arc;

use axum::body::Body;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{header, Method, StatusCode, Uri};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use scisoftx_core::graph::{build_file_graph, build_package_graph, GraphLevel};
use scisoftx_core::links::{link_id, merge};
use scisoftx_core::{CodeIndex, DocumentModel, EntityKind, Label, Link, LinkError, LinkSet, LinkerParams, Origin};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tokio::sync::Mutex;

use crate::config::ProjectConfig;
use crate::extract::extract_spans;
use crate::formats::{check_binding, export_xml, import_xml, Binding};
use crate::repo::build_index;

const FALLBACK_INDEX: &str = "<!doctype html>\n<html><head><meta charset=\"utf-8\"><title>scisoftx</title></head>\n<body><p>The explorer UI is not installed. The API is available under <code>/api/</code>.</p></body></html>\n";

/// An API failure, sent as `{code, message}`.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    fn bad_request(code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            code,
            message: message.into(),
        }
    }

    fn not_found(code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::NOT_FOUND,
            code,
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            code: "Internal",
            message: message.into(),
        }
    }
}

impl From<LinkError> for ApiError {
    fn from(e: LinkError) -> Self {
        match e {
            LinkError::DuplicateLink => ApiError {
                status: StatusCode::CONFLICT,
                code: "DuplicateLink",
                message: e.to_string(),
            },
            LinkError::InvalidLabel(_) => ApiError::bad_request("InvalidLabel", e.to_string()),
            LinkError::InvalidLink(_) => ApiError::bad_request("InvalidLink", e.to_string()),
            LinkError::DigestMismatch => ApiError::bad_request("DigestMismatch", e.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "code": self.code, "message": self.message }))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

/// Failure to bring a project up.
#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("config has no {0}")]
    Missing(&'static str),
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Invalid(String),
}

struct Project {
    pdf: Vec<u8>,
    document: DocumentModel,
    index: CodeIndex,
    links: LinkSet,
    links_path: Option<PathBuf>,
    params: LinkerParams,
    dirty: bool,
}

/// Shared service state. All mutations take the one lock, so they apply in order.
#[derive(Clone)]
pub struct AppState {
    project: Arc<Mutex<Project>>,
    static_dir: Option<PathBuf>,
}

fn read(path: &Path) -> Result<Vec<u8>, LoadError> {
    std::fs::read(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })
}

impl AppState {
    /// Extracts the document, indexes the repository and loads the link
    /// file when it exists. A link file for another document is rejected.
    pub fn load(config: &ProjectConfig, static_dir: Option<PathBuf>) -> Result<Self, LoadError> {
        let pdf_path = config.pdf_path.as_deref().ok_or(LoadError::Missing("pdf_path"))?;
        let repo_path = config.repo_path.as_deref().ok_or(LoadError::Missing("repo_path"))?;
        let pdf = read(pdf_path)?;
        let document = extract_spans(&pdf).map_err(|e| LoadError::Invalid(format!("{}: {e}", pdf_path.display())))?;
        let profiles = config.profile_set().map_err(|e| LoadError::Invalid(e.to_string()))?;
        let index = build_index(repo_path, &profiles).map_err(|e| LoadError::Invalid(e.to_string()))?;
        let links = match &config.links_path {
            Some(p) if p.exists() => {
                let set = import_xml(&read(p)?).map_err(|e| LoadError::Invalid(format!("{}: {e}", p.display())))?;
                match check_binding(&set, &document.source_digest, index.source_digest()) {
                    Ok(Binding::Matches) => {}
                    Ok(Binding::CodeChanged) => {
                        eprintln!("warning: {} was made against a different version of the code", p.display())
                    }
                    Err(e) => return Err(LoadError::Invalid(format!("{}: {e}", p.display()))),
                }
                set
            }
            _ => LinkSet::new(document.source_digest.clone(), index.source_digest()),
        };
        Ok(AppState {
            project: Arc::new(Mutex::new(Project {
                pdf,
                document,
                index,
                links,
                links_path: config.links_path.clone(),
                params: config.linker_params(),
                dirty: false,
            })),
            static_dir,
        })
    }

    /// Writes the link set if it changed since the last write. Returns
    /// whether anything was written.
    pub async fn flush(&self) -> std::io::Result<bool> {
        let mut p = self.project.lock().await;
        if !p.dirty {
            return Ok(false);
        }
        let Some(path) = p.links_path.clone() else {
            return Ok(false);
        };
        write_links(&path, &p.links)?;
        p.dirty = false;
        Ok(true)
    }
}

fn write_links(path: &Path, set: &LinkSet) -> std::io::Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("xml.tmp");
    std::fs::write(&tmp, export_xml(set))?;
    std::fs::rename(&tmp, path)
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/document", get(get_document))
        .route("/api/document/raw", get(get_document_raw))
        .route("/api/code/entities", get(get_entities))
        .route("/api/code/source", get(get_source))
        .route("/api/links", get(get_links).post(post_link))
        .route("/api/links/auto", post(post_auto))
        .route("/api/links/{id}", delete(delete_link))
        .route("/api/graph", get(get_graph))
        .route("/api/export", post(post_export))
        .fallback(fallback)
        .with_state(state)
}

async fn get_document(State(s): State<AppState>) -> Json<DocumentModel> {
    Json(s.project.lock().await.document.clone())
}

async fn get_document_raw(State(s): State<AppState>) -> Response {
    let pdf = s.project.lock().await.pdf.clone();
    ([(header::CONTENT_TYPE, "application/pdf")], pdf).into_response()
}

async fn get_entities(State(s): State<AppState>) -> Response {
    let p = s.project.lock().await;
    let body = crate::formats::index_to_json(&p.index);
    ([(header::CONTENT_TYPE, "application/json")], body).into_response()
}

#[derive(Deserialize)]
struct SourceQuery {
    file: Option<String>,
}

async fn get_source(State(s): State<AppState>, Query(q): Query<SourceQuery>) -> ApiResult<Response> {
    let file = q.file.ok_or_else(|| ApiError::bad_request("MissingParameter", "query parameter file is required"))?;
    let root = {
        let p = s.project.lock().await;
        if p.index.file_entity(&file).is_none() {
            return Err(ApiError::not_found("UnknownFile", format!("{file} is not an indexed file")));
        }
        PathBuf::from(p.index.root_dir())
    };
    let text = tokio::fs::read(root.join(&file))
        .await
        .map_err(|e| ApiError::internal(format!("reading {file}: {e}")))?;
    Ok(([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], text).into_response())
}

#[derive(Serialize)]
struct LinksBody<'a> {
    document_digest: &'a str,
    code_digest: &'a str,
    links: &'a [Link],
}

async fn get_links(State(s): State<AppState>) -> Response {
    let p = s.project.lock().await;
    Json(LinksBody {
        document_digest: &p.links.document_digest,
        code_digest: &p.links.code_digest,
        links: p.links.links(),
    })
    .into_response()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NewLink {
    page: u32,
    line: u32,
    char_start: u32,
    char_end: u32,
    target_qname: String,
    #[serde(default)]
    snippet: Option<String>,
    #[serde(default)]
    label: Option<String>,
}

/// Text of a document line over a character range.
fn line_text(doc: &DocumentModel, page: u32, line: u32, start: u32, end: u32) -> Option<String> {
    if !doc.covers(page, line, start, end) {
        return None;
    }
    let text = doc.line_text(page, line)?;
    Some(text.chars().skip(start as usize).take((end - start) as usize).collect())
}

fn parse_body<T: serde::de::DeserializeOwned>(body: &[u8]) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request("InvalidRequest", e.to_string()))
}

async fn post_link(State(s): State<AppState>, body: axum::body::Bytes) -> ApiResult<Response> {
    let req: NewLink = parse_body(&body)?;
    let label = match &req.label {
        Some(l) => l.parse::<Label>()?,
        None => Label::Mentions,
    };
    if req.char_start >= req.char_end {
        return Err(ApiError::bad_request("InvalidLink", "char_start must be below char_end"));
    }
    let mut p = s.project.lock().await;
    let target = p
        .index
        .qname_map()
        .get(&req.target_qname)
        .into_iter()
        .flatten()
        .filter_map(|&id| p.index.entity(id))
        .find(|e| e.kind != EntityKind::Package)
        .ok_or_else(|| ApiError::bad_request("UnknownTarget", format!("{} is not in the code index", req.target_qname)))?;
    let (target_file, target_line) = (target.file_path.clone(), target.line_start.max(1));
    let snippet = match req.snippet {
        Some(s) => s,
        None => line_text(&p.document, req.page, req.line, req.char_start, req.char_end)
            .ok_or_else(|| ApiError::bad_request("InvalidLink", "range is outside the document text"))?,
    };
    let link = Link {
        link_id: link_id(req.page, req.line, req.char_start, req.char_end, &req.target_qname),
        page: req.page,
        line: req.line,
        char_start: req.char_start,
        char_end: req.char_end,
        snippet,
        target_qname: req.target_qname,
        target_file,
        target_line,
        label,
        origin: Origin::Manual,
        score: 0,
    };
    p.links.add_link(link.clone())?;
    p.dirty = true;
    Ok((StatusCode::CREATED, Json(link)).into_response())
}

async fn delete_link(State(s): State<AppState>, UrlPath(id): UrlPath<String>) -> ApiResult<StatusCode> {
    let mut p = s.project.lock().await;
    match p.links.remove(&id) {
        Some(_) => {
            p.dirty = true;
            Ok(StatusCode::NO_CONTENT)
        }
        None => Err(ApiError::not_found("UnknownLink", format!("no link with id {id}"))),
    }
}

/// Replaces all auto links with a fresh linker run; manual links stay.
async fn post_auto(State(s): State<AppState>) -> ApiResult<Json<Value>> {
    let mut p = s.project.lock().await;
    let auto = scisoftx_core::linker::link_document(&p.document, &p.index, &p.params);
    let manual = p.links.with_origin(Origin::Manual);
    let merged = merge(&auto, &manual)?;
    if merged != p.links {
        p.links = merged;
        p.dirty = true;
    }
    let autos = p.links.links().iter().filter(|l| l.origin == Origin::Auto).count();
    Ok(Json(json!({ "links": p.links.len(), "auto": autos, "manual": p.links.len() - autos })))
}

#[derive(Deserialize)]
struct GraphQuery {
    level: Option<String>,
}

async fn get_graph(State(s): State<AppState>, Query(q): Query<GraphQuery>) -> ApiResult<Response> {
    let level: GraphLevel = q
        .level
        .as_deref()
        .unwrap_or("file")
        .parse()
        .map_err(|_| ApiError::bad_request("InvalidLevel", "level must be file or package"))?;
    let p = s.project.lock().await;
    let build = match level {
        GraphLevel::File => build_file_graph(&p.links, &p.index),
        GraphLevel::Package => build_package_graph(&p.links, &p.index),
    };
    let body = crate::formats::graph_to_json(&build.graph);
    Ok(([(header::CONTENT_TYPE, "application/json")], body).into_response())
}

async fn post_export(State(s): State<AppState>) -> ApiResult<Json<Value>> {
    let mut p = s.project.lock().await;
    let path = p
        .links_path
        .clone()
        .ok_or_else(|| ApiError::bad_request("NoLinksPath", "the project config has no links_path"))?;
    write_links(&path, &p.links).map_err(|e| ApiError::internal(format!("writing {}: {e}", path.display())))?;
    p.dirty = false;
    Ok(Json(json!({ "path": path.display().to_string(), "links": p.links.len() })))
}

fn content_type(path: &Path) -> &'static str {
    match path.extension().and_then(|e| e.to_str()).unwrap_or("") {
        "html" => "text/html; charset=utf-8",
        "js" | "mjs" => "text/javascript",
        "css" => "text/css",
        "json" | "map" => "application/json",
        "svg" => "image/svg+xml",
        "png" => "image/png",
        "ico" => "image/x-icon",
        "woff2" => "font/woff2",
        _ => "application/octet-stream",
    }
}

/// Static assets, with `index.html` for any path that is not a file.
async fn fallback(State(s): State<AppState>, method: Method, uri: Uri) -> Response {
    let path = uri.path();
    if path.starts_with("/api/") || path == "/api" {
        return ApiError::not_found("UnknownRoute", format!("no route for {method} {path}")).into_response();
    }
    if method != Method::GET && method != Method::HEAD {
        return StatusCode::METHOD_NOT_ALLOWED.into_response();
    }
    let html = [(header::CONTENT_TYPE, "text/html; charset=utf-8")];
    let Some(dir) = &s.static_dir else {
        return (html, FALLBACK_INDEX).into_response();
    };
    let rel = Path::new(path.trim_start_matches('/'));
    if rel.components().all(|c| matches!(c, Component::Normal(_))) && !rel.as_os_str().is_empty() {
        let file = dir.join(rel);
        if let Ok(bytes) = tokio::fs::read(&file).await {
            return ([(header::CONTENT_TYPE, content_type(&file))], Body::from(bytes)).into_response();
        }
    }
    match tokio::fs::read(dir.join("index.html")).await {
        Ok(bytes) => (html, Body::from(bytes)).into_response(),
        Err(_) => (html, FALLBACK_INDEX).into_response(),
    }
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        if let Ok(mut s) = tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            s.recv().await;
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {}
        _ = term => {}
    }
}

/// Serves until interrupted, then writes pending link changes.
pub async fn serve(state: AppState, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state.clone()))
        .with_graceful_shutdown(shutdown_signal())
        .await?;
    if state.flush().await? {
        eprintln!("saved pending link changes");
    }
    Ok(())
}
