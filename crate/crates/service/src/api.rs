use std::collections::BTreeSet;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::QueryRejection;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use gnomon_core::intertext::{alignment, build_indices, network_neighborhood, related_segments, transmission_paths};
use gnomon_core::{Diagnostic, EntityKind};
use serde::Deserialize;
use serde_json::json;
use tower_http::cors::CorsLayer;

use crate::error::ServiceError;
use crate::shared::Corpus;
use crate::state::NewAssertion;

type Shared = Arc<Corpus>;

#[derive(Debug)]
struct ApiError {
    status: StatusCode,
    error: String,
    message: String,
    diagnostics: Option<Vec<Diagnostic>>,
}

impl ApiError {
    fn bad_request(error: &str, message: impl Into<String>) -> ApiError {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            error: error.to_string(),
            message: message.into(),
            diagnostics: None,
        }
    }
}

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> ApiError {
        let status = match &e {
            ServiceError::NotFound(_) => StatusCode::NOT_FOUND,
            ServiceError::Rejected { .. } => StatusCode::UNPROCESSABLE_ENTITY,
            ServiceError::Io { .. } | ServiceError::Journal { .. } => StatusCode::INTERNAL_SERVER_ERROR,
        };
        let message = e.to_string();
        let error = e.rule().to_string();
        let diagnostics = match e {
            ServiceError::Rejected { diagnostics } => Some(diagnostics),
            _ => None,
        };
        ApiError {
            status,
            error,
            message,
            diagnostics,
        }
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> ApiError {
        ApiError::bad_request("invalid-query", e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.error, "message": self.message });
        if let Some(d) = self.diagnostics {
            body["diagnostics"] = json!(d);
        }
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn split_list(value: Option<&str>) -> Vec<String> {
    value
        .unwrap_or("")
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}

#[derive(Debug, Deserialize)]
struct IriQuery {
    iri: String,
}

#[derive(Debug, Deserialize)]
struct AlignQuery {
    iri: String,
    open: Option<String>,
}

#[derive(Debug, Deserialize)]
struct NetworkQuery {
    iri: String,
    depth: Option<usize>,
}

#[derive(Debug, Deserialize)]
struct PathsQuery {
    from: String,
    to: Option<String>,
    depth: Option<usize>,
}

#[derive(Debug, Deserialize)]
struct TriplesQuery {
    provenance: Option<bool>,
}

#[derive(Debug, Deserialize)]
struct CitationQuery {
    docs: Option<String>,
}

async fn documents(State(c): State<Shared>) -> impl IntoResponse {
    Json(c.current().summaries())
}

async fn document(State(c): State<Shared>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(c.current().render_document(&id)?))
}

async fn document_xml(State(c): State<Shared>, Path(id): Path<String>) -> ApiResult<Response> {
    let state = c.current();
    let xml = state.document(&id)?.xml.clone();
    Ok(([(header::CONTENT_TYPE, "application/xml; charset=utf-8")], xml).into_response())
}

async fn bibliography(State(c): State<Shared>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    let state = c.current();
    Ok(Json(state.document(&id)?.document.header_bibliography.clone()))
}

async fn relations(
    State(c): State<Shared>,
    q: Result<Query<IriQuery>, QueryRejection>,
) -> ApiResult<impl IntoResponse> {
    let q = q?;
    let s = c.current();
    Ok(Json(related_segments(s.snapshot(), s.vocabulary(), s.index(), &q.iri)))
}

async fn align(State(c): State<Shared>, q: Result<Query<AlignQuery>, QueryRejection>) -> ApiResult<impl IntoResponse> {
    let q = q?;
    let s = c.current();
    let open: BTreeSet<String> = split_list(q.open.as_deref()).into_iter().collect();
    Ok(Json(alignment(s.snapshot(), s.vocabulary(), s.index(), &q.iri, &open)))
}

async fn network(
    State(c): State<Shared>,
    q: Result<Query<NetworkQuery>, QueryRejection>,
) -> ApiResult<impl IntoResponse> {
    let q = q?;
    let s = c.current();
    let depth = q.depth.unwrap_or(1);
    Ok(Json(network_neighborhood(
        s.snapshot(),
        s.vocabulary(),
        s.index(),
        &q.iri,
        depth,
    )))
}

async fn paths(State(c): State<Shared>, q: Result<Query<PathsQuery>, QueryRejection>) -> ApiResult<impl IntoResponse> {
    let q = q?;
    let s = c.current();
    let depth = q.depth.unwrap_or(3);
    let found = transmission_paths(s.snapshot(), s.vocabulary(), &q.from, q.to.as_deref(), depth)
        .map_err(|e| ApiError::bad_request("invalid-depth", e.to_string()))?;
    Ok(Json(found.into_iter().collect::<Vec<_>>()))
}

async fn indices(State(c): State<Shared>, Path(kind): Path<String>) -> ApiResult<impl IntoResponse> {
    let kind = EntityKind::parse(&kind).ok_or_else(|| {
        let known: Vec<_> = EntityKind::ALL.iter().map(|k| k.as_str()).collect();
        ApiError::bad_request(
            "unknown-index",
            format!("no index `{kind}`; expected one of {}", known.join(", ")),
        )
    })?;
    let s = c.current();
    let mut entries = build_indices(s.documents().values().map(|d| &d.document), s.config());
    entries.retain(|e| e.kind == kind);
    Ok(Json(entries))
}

async fn triples(State(c): State<Shared>, q: Result<Query<TriplesQuery>, QueryRejection>) -> ApiResult<Response> {
    let q = q?;
    let body = c.current().export(q.provenance.unwrap_or(false));
    Ok(([(header::CONTENT_TYPE, "application/n-triples; charset=utf-8")], body).into_response())
}

async fn post_relation(State(c): State<Shared>, body: Bytes) -> ApiResult<Response> {
    let assertion: NewAssertion =
        serde_json::from_slice(&body).map_err(|e| ApiError::bad_request("invalid-body", e.to_string()))?;
    let record = tokio::task::spawn_blocking(move || c.append(&assertion))
        .await
        .map_err(|e| ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            error: "internal".into(),
            message: e.to_string(),
            diagnostics: None,
        })??;
    let assertion_id = record.assertion().to_quad().meta.map(|m| m.assertion_id);
    log::info!("journal record {} accepted", record.record_id);
    let body = json!({
        "record_id": record.record_id,
        "received_at": record.received_at,
        "assertion_id": assertion_id,
    });
    Ok((StatusCode::CREATED, Json(body)).into_response())
}

async fn citation(
    State(c): State<Shared>,
    q: Result<Query<CitationQuery>, QueryRejection>,
) -> ApiResult<impl IntoResponse> {
    let q = q?;
    let today = chrono::Utc::now().date_naive();
    Ok(Json(c.current().citations(&split_list(q.docs.as_deref()), today)))
}

async fn fallback() -> ApiError {
    ApiError {
        status: StatusCode::NOT_FOUND,
        error: "not-found".into(),
        message: "no such endpoint".into(),
        diagnostics: None,
    }
}

pub fn router(corpus: Arc<Corpus>) -> Router {
    Router::new()
        .route("/api/documents", get(documents))
        .route("/api/documents/{id}", get(document))
        .route("/api/documents/{id}/xml", get(document_xml))
        .route("/api/documents/{id}/bibliography", get(bibliography))
        .route("/api/segments/relations", get(relations))
        .route("/api/segments/alignment", get(align))
        .route("/api/segments/network", get(network))
        .route("/api/paths", get(paths))
        .route("/api/indices/{kind}", get(indices))
        .route("/api/triples", get(triples))
        .route("/api/relations", axum::routing::post(post_relation))
        .route("/api/citation", get(citation))
        .fallback(fallback)
        .layer(CorsLayer::permissive())
        .with_state(corpus)
}

/// Serves the API on `addr` until interrupted.
pub async fn serve(corpus: Arc<Corpus>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(corpus))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
