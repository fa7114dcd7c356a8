//! JSON HTTP API over the shared [`AppState`].

use std::collections::HashMap;
use std::future::Future;
use std::path::Path;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{
    DefaultBodyLimit, FromRequest, Multipart, Path as UrlPath, Query, Request, State,
};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use conceptmap_core::analytics::{query_relations, shortest_path};
use conceptmap_core::corpus::{Corpus, Document, IngestOptions};
use conceptmap_core::graphstore::NodeId;
use conceptmap_core::Error as CoreError;
use serde_json::{json, Value};
use tower_http::services::ServeDir;

use crate::state::{AppState, Snapshot, StartError};

/// An error response: `{code, message, detail}` with an HTTP status.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    pub detail: Value,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
            detail: Value::Null,
        }
    }

    fn with_detail(mut self, detail: Value) -> Self {
        self.detail = detail;
        self
    }

    fn bad_request(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    fn not_found(code: &'static str, message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, code, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "code": self.code, "message": self.message, "detail": self.detail });
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T = Response> = Result<T, ApiError>;

type Params = Query<HashMap<String, String>>;

fn param_usize(params: &HashMap<String, String>, name: &str) -> ApiResult<Option<usize>> {
    params
        .get(name)
        .map(|v| {
            v.parse().map_err(|_| {
                ApiError::bad_request(format!("{name} must be a non-negative integer, got {v:?}"))
                    .with_detail(json!({ "parameter": name }))
            })
        })
        .transpose()
}

fn param_bool(params: &HashMap<String, String>, name: &str) -> ApiResult<bool> {
    match params.get(name).map(|v| v.to_ascii_lowercase()) {
        None => Ok(false),
        Some(v) => match v.as_str() {
            "" | "1" | "true" | "yes" => Ok(true),
            "0" | "false" | "no" => Ok(false),
            _ => Err(
                ApiError::bad_request(format!("{name} must be true or false, got {v:?}"))
                    .with_detail(json!({ "parameter": name })),
            ),
        },
    }
}

/// Resolves a node from `{name}` (a surface or canonical name) or `{name}_id`.
fn resolve_node(
    snapshot: &Snapshot,
    params: &HashMap<String, String>,
    name: &str,
) -> ApiResult<NodeId> {
    let id_param = format!("{name}_id");
    if let Some(id) = param_usize(params, &id_param)? {
        return match snapshot.graph.node(id) {
            Some(_) => Ok(id),
            None => Err(
                ApiError::not_found("unknown_node", format!("unknown node id {id}"))
                    .with_detail(json!({ "parameter": id_param, "value": id })),
            ),
        };
    }
    let Some(value) = params.get(name) else {
        return Err(ApiError::bad_request(format!("missing parameter {name}"))
            .with_detail(json!({ "parameter": name })));
    };
    snapshot.graph.find_node(value).ok_or_else(|| {
        ApiError::not_found("unknown_node", format!("unknown node {value:?}"))
            .with_detail(json!({ "parameter": name, "value": value }))
    })
}

/// Builds the router. Static files, when configured, answer every path the
/// API does not.
pub fn router(state: Arc<AppState>) -> Router {
    let limit = state.config.max_upload_bytes;
    let static_dir = state.config.static_dir.clone();
    let api = Router::new()
        .route("/api/health", get(health))
        .route("/api/documents", post(upload_documents))
        .route("/api/pipeline/run", post(start_run))
        .route("/api/runs/{id}", get(get_run))
        .route("/api/runs/{id}/report", get(get_report))
        .route("/api/graph", get(graph_page))
        .route("/api/graph/path", get(graph_path))
        .route("/api/graph/centrality", get(graph_centrality))
        .route("/api/graph/query", get(graph_query))
        .route("/api/graph/neighborhood", get(graph_neighborhood))
        .route("/api/triples", get(triples))
        .layer(DefaultBodyLimit::max(limit))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.fallback(|| async { ApiError::not_found("not_found", "no such endpoint") }),
    }
}

/// Serves `router` on `listener` until `shutdown` resolves, letting
/// in-flight requests finish.
pub async fn serve_on(
    listener: tokio::net::TcpListener,
    router: Router,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router)
        .with_graceful_shutdown(shutdown)
        .await
}

async fn health(State(state): State<Arc<AppState>>) -> Json<Value> {
    let snapshot = state.snapshot();
    Json(json!({
        "status": "ok",
        "version": env!("CARGO_PKG_VERSION"),
        "run": snapshot.run,
        "active_run": state.active_run(),
        "staged_documents": state.staged_count(),
        "nodes": snapshot.graph.node_count(),
        "edges": snapshot.graph.edge_count(),
    }))
}

fn upload_error(err: CoreError) -> ApiError {
    match err {
        CoreError::DuplicateDocument(id) => ApiError::new(
            StatusCode::CONFLICT,
            "duplicate_document",
            format!("document {id:?} is already staged"),
        )
        .with_detail(json!({ "doc_id": id })),
        CoreError::Record { line, message, .. } => ApiError::new(
            StatusCode::BAD_REQUEST,
            "invalid_upload",
            format!("line {line}: {message}"),
        )
        .with_detail(json!({ "line": line })),
        CoreError::InvalidDocument { doc_id, message } => ApiError::new(
            StatusCode::BAD_REQUEST,
            "invalid_upload",
            format!("document {doc_id:?}: {message}"),
        )
        .with_detail(json!({ "doc_id": doc_id })),
        CoreError::EmptyCorpus => ApiError::new(
            StatusCode::BAD_REQUEST,
            "invalid_upload",
            "upload contains no documents",
        ),
        other => ApiError::new(
            StatusCode::INTERNAL_SERVER_ERROR,
            "internal",
            other.to_string(),
        ),
    }
}

fn utf8(bytes: &[u8], what: &str) -> ApiResult<String> {
    String::from_utf8(bytes.to_vec()).map_err(|e| {
        ApiError::new(
            StatusCode::BAD_REQUEST,
            "invalid_upload",
            format!("{what} is not UTF-8: {e}"),
        )
    })
}

/// Multipart parts named `*.txt` become one document each (id = file stem);
/// any other part is read as JSONL.
async fn parse_multipart(mut multipart: Multipart) -> ApiResult<Corpus> {
    let options = IngestOptions::default();
    let mut corpus: Option<Corpus> = None;
    let mut index = 0;
    while let Some(field) = multipart
        .next_field()
        .await
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "invalid_upload", e.body_text()))?
    {
        index += 1;
        let name = field
            .file_name()
            .or(field.name())
            .map(str::to_string)
            .unwrap_or_else(|| format!("part-{index}"));
        let bytes = field
            .bytes()
            .await
            .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "invalid_upload", e.body_text()))?;
        let text = utf8(&bytes, &name)?;
        let part = match name.strip_suffix(".txt") {
            Some(stem) => {
                let doc_id = Path::new(stem)
                    .file_name()
                    .map_or(stem.to_string(), |s| s.to_string_lossy().into());
                Corpus::from_documents([(Document::new(doc_id, text), name.clone())], &options)
            }
            None => Corpus::parse_jsonl(&text, Path::new(&name), &options),
        }
        .map_err(|e| upload_error(e).with_part(&name))?;
        corpus = Some(match corpus {
            Some(c) => c.merge(&part).map_err(upload_error)?,
            None => part,
        });
    }
    corpus.ok_or_else(|| {
        ApiError::new(
            StatusCode::BAD_REQUEST,
            "invalid_upload",
            "upload contains no documents",
        )
    })
}

impl ApiError {
    fn with_part(mut self, part: &str) -> Self {
        if let Value::Object(map) = &mut self.detail {
            map.insert("part".into(), json!(part));
        } else {
            self.detail = json!({ "part": part });
        }
        self
    }
}

async fn upload_documents(State(state): State<Arc<AppState>>, request: Request) -> ApiResult {
    let is_multipart = request
        .headers()
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.starts_with("multipart/form-data"));
    let corpus = if is_multipart {
        let multipart = Multipart::from_request(request, &())
            .await
            .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "invalid_upload", e.body_text()))?;
        parse_multipart(multipart).await?
    } else {
        let bytes = Bytes::from_request(request, &())
            .await
            .map_err(|e| ApiError::new(e.status(), "invalid_upload", e.body_text()))?;
        let text = utf8(&bytes, "body")?;
        Corpus::parse_jsonl(&text, Path::new("body"), &IngestOptions::default())
            .map_err(upload_error)?
    };
    let added = corpus.len();
    let doc_ids: Vec<&str> = corpus
        .documents()
        .iter()
        .map(|d| d.doc_id.as_str())
        .collect();
    let doc_ids = json!(doc_ids);
    let total = state.stage(corpus).map_err(upload_error)?;
    Ok((
        StatusCode::CREATED,
        Json(json!({ "staged": added, "doc_ids": doc_ids, "total": total })),
    )
        .into_response())
}

async fn start_run(State(state): State<Arc<AppState>>) -> ApiResult {
    let (run, corpus) = state.begin_run().map_err(|e| match e {
        StartError::NoDocuments => {
            ApiError::bad_request("no documents are staged").with_detail(Value::Null)
        }
        StartError::Busy(id) => ApiError::new(
            StatusCode::CONFLICT,
            "busy",
            format!("run {id} is still in progress"),
        )
        .with_detail(json!({ "run_id": id })),
    })?;
    let id = run.run_id.clone();
    let worker = state.clone();
    tokio::task::spawn_blocking(move || worker.execute(&id, &corpus));
    let location = format!("/api/runs/{}", run.run_id);
    Ok((
        StatusCode::ACCEPTED,
        [(header::LOCATION, location)],
        Json(run),
    )
        .into_response())
}

async fn get_run(State(state): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult {
    state
        .run(&id)
        .map(|run| Json(run).into_response())
        .ok_or_else(|| unknown_run(&id))
}

fn unknown_run(id: &str) -> ApiError {
    ApiError::not_found("unknown_run", format!("unknown run {id:?}"))
        .with_detail(json!({ "run_id": id }))
}

async fn get_report(State(state): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult {
    let Some(run) = state.run(&id) else {
        return Err(unknown_run(&id));
    };
    match state.report(&id) {
        Some(report) => Ok(Json(report.as_ref()).into_response()),
        None => Err(
            ApiError::not_found("report_unavailable", format!("run {id:?} has no report"))
                .with_detail(json!({ "run_id": id, "status": run.status })),
        ),
    }
}

fn paging(params: &HashMap<String, String>, total: usize) -> ApiResult<(usize, usize)> {
    let offset = param_usize(params, "offset")?.unwrap_or(0);
    let limit = param_usize(params, "limit")?.unwrap_or(total);
    Ok((offset, limit))
}

async fn graph_page(
    State(state): State<Arc<AppState>>,
    Query(params): Params,
) -> ApiResult<Json<Value>> {
    let snapshot = state.snapshot();
    let graph = &snapshot.graph;
    let (offset, limit) = paging(&params, graph.node_count())?;
    let page = graph.page(offset, limit);
    Ok(Json(json!({
        "total_nodes": graph.node_count(),
        "total_edges": graph.edge_count(),
        "offset": offset,
        "limit": limit,
        "nodes": page.nodes,
        "edges": page.edges,
    })))
}

async fn graph_path(
    State(state): State<Arc<AppState>>,
    Query(params): Params,
) -> ApiResult<Json<Value>> {
    let snapshot = state.snapshot();
    let source = resolve_node(&snapshot, &params, "source")?;
    let target = resolve_node(&snapshot, &params, "target")?;
    let directed = param_bool(&params, "directed")?;
    let path = shortest_path(&snapshot.graph, source, target, directed)
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?;
    Ok(Json(json!({
        "found": !path.is_empty(),
        "directed": directed,
        "nodes": path.nodes,
        "edges": path.edges,
        "total_cost": path.total_cost,
    })))
}

async fn graph_centrality(
    State(state): State<Arc<AppState>>,
    Query(params): Params,
) -> ApiResult<Json<Value>> {
    let snapshot = state.snapshot();
    let directed = param_bool(&params, "directed")?;
    let top = param_usize(&params, "top")?;
    let table = snapshot.centrality(directed);
    let scores: Vec<Value> = snapshot
        .graph
        .nodes()
        .iter()
        .map(|n| {
            json!({
                "node_id": n.node_id,
                "display_name": n.display_name,
                "score": table.scores[n.node_id],
            })
        })
        .collect();
    let mut ranking = table.ranking();
    if let Some(k) = top {
        ranking.truncate(k);
    }
    Ok(Json(
        json!({ "directed": directed, "scores": scores, "ranking": ranking }),
    ))
}

async fn graph_query(
    State(state): State<Arc<AppState>>,
    Query(params): Params,
) -> ApiResult<Json<Value>> {
    let relation = params.get("relation").map(|s| s.trim()).unwrap_or("");
    if relation.is_empty() {
        return Err(ApiError::bad_request("relation must be non-empty")
            .with_detail(json!({ "parameter": "relation" })));
    }
    let snapshot = state.snapshot();
    let sub = query_relations(&snapshot.graph, relation);
    Ok(Json(
        json!({ "relation": relation, "nodes": sub.nodes, "edges": sub.edges }),
    ))
}

async fn graph_neighborhood(
    State(state): State<Arc<AppState>>,
    Query(params): Params,
) -> ApiResult<Json<Value>> {
    let snapshot = state.snapshot();
    let center = resolve_node(&snapshot, &params, "node")?;
    let radius = param_usize(&params, "radius")?.unwrap_or(1);
    let sub = snapshot
        .graph
        .neighborhood(center, radius)
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?;
    Ok(Json(
        json!({ "center": center, "radius": radius, "nodes": sub.nodes, "edges": sub.edges }),
    ))
}

async fn triples(State(state): State<Arc<AppState>>, Query(params): Params) -> ApiResult {
    let snapshot = state.snapshot();
    let stage = params.get("stage").map(String::as_str).unwrap_or("pruned");
    let all = match stage {
        "raw" => &snapshot.raw_triples,
        "pruned" => &snapshot.pruned_triples,
        other => {
            return Err(ApiError::bad_request(format!(
                "stage must be raw or pruned, got {other:?}"
            ))
            .with_detail(json!({ "parameter": "stage" })))
        }
    };
    let (offset, limit) = paging(&params, all.len())?;
    let start = offset.min(all.len());
    let end = start.saturating_add(limit).min(all.len());
    Ok(Json(json!({
        "stage": stage,
        "total": all.len(),
        "offset": offset,
        "limit": limit,
        "triples": &all[start..end],
    }))
    .into_response())
}
