//! HTTP API over a [`RatingStore`].
//!
//! Reads share the store; submissions take the write lock, which keeps each
//! session's append-only log single-writer. Audio bytes are read after the
//! lock is released.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use clonaug_core::rating::{RatingCategory, RatingRecord, RatingStore};
use clonaug_core::Error;
use serde::Deserialize;
use tokio::sync::RwLock;

pub type SharedStore = Arc<RwLock<RatingStore>>;

pub struct ApiError(StatusCode, String);

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::NotFound(_) => StatusCode::NOT_FOUND,
            Error::Conflict(_) => StatusCode::CONFLICT,
            Error::InvalidCategory(_) | Error::InvalidConfig(_) => StatusCode::BAD_REQUEST,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError(status, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(serde_json::json!({ "error": self.1 }))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

#[derive(Deserialize)]
struct RaterQuery {
    rater: Option<String>,
}

/// Body of `POST /api/ratings`. The category stays a string here so an
/// unknown value is reported as such instead of as a generic body error.
#[derive(Deserialize)]
struct Submission {
    task_id: String,
    rater_id: String,
    category: String,
    #[serde(default)]
    timestamp: Option<String>,
}

async fn sessions(State(store): State<SharedStore>) -> impl IntoResponse {
    Json(store.read().await.summaries())
}

async fn tasks(
    State(store): State<SharedStore>,
    Path(id): Path<String>,
    Query(q): Query<RaterQuery>,
) -> ApiResult<impl IntoResponse> {
    Ok(Json(store.read().await.tasks_for(&id, q.rater.as_deref())?))
}

async fn scores(State(store): State<SharedStore>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(store.read().await.scores(&id)?))
}

async fn audio(State(store): State<SharedStore>, Path(audio_id): Path<String>) -> ApiResult<Response> {
    let path = store.read().await.audio_path(&audio_id)?.to_path_buf();
    let bytes = tokio::fs::read(&path)
        .await
        .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, format!("{}: {e}", path.display())))?;
    Ok(([(header::CONTENT_TYPE, "audio/wav")], bytes).into_response())
}

async fn submit(
    State(store): State<SharedStore>,
    body: Result<Json<Submission>, JsonRejection>,
) -> ApiResult<impl IntoResponse> {
    let Json(s) = body.map_err(|e| ApiError(StatusCode::BAD_REQUEST, e.body_text()))?;
    let record = RatingRecord {
        task_id: s.task_id,
        rater_id: s.rater_id,
        category: s.category.parse::<RatingCategory>()?,
        timestamp: s.timestamp,
    };
    let stored = store.write().await.submit(record)?;
    Ok((StatusCode::CREATED, Json(stored)))
}

pub fn router(store: SharedStore) -> Router {
    Router::new()
        .route("/api/sessions", get(sessions))
        .route("/api/sessions/{id}/tasks", get(tasks))
        .route("/api/sessions/{id}/scores", get(scores))
        .route("/api/audio/{audio_id}", get(audio))
        .route("/api/ratings", post(submit))
        .with_state(store)
}

pub fn shared(store: RatingStore) -> SharedStore {
    Arc::new(RwLock::new(store))
}

/// Serves until the process is stopped.
pub async fn serve(store: RatingStore, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(shared(store))).await
}
