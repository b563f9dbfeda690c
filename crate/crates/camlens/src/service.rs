//! HTTP API over the classifier and the capture store.

use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use camlens_core::{threshold_mask, Model, DEFAULT_THRESHOLD, DEFAULT_TOP_K};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::services::ServeDir;

use crate::codec::{decode_image, ImageFormat};
use crate::compare::compare_captures;
use crate::error::Error;
use crate::pipeline::{classify, ClassifyPayload, GridDims};
use crate::store::{CaptureStore, NewCapture, Tag};

pub const DEFAULT_BODY_LIMIT: usize = 8 * 1024 * 1024;

#[derive(Clone)]
pub struct AppState {
    pub model: Arc<Model>,
    pub store: Arc<CaptureStore>,
}

pub struct ServiceConfig {
    pub body_limit: usize,
    /// Directory with the browser app bundle, served at `/`.
    pub static_dir: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            body_limit: DEFAULT_BODY_LIMIT,
            static_dir: None,
        }
    }
}

pub fn router(state: AppState, config: ServiceConfig) -> Router {
    let api = Router::new()
        .route("/api/classify", post(classify_handler))
        .route("/api/captures", get(list_handler))
        .route("/api/captures/{id}", get(capture_handler))
        .route("/api/captures/{id}/tag", post(tag_handler))
        .route("/api/captures/{id}/image", get(image_handler))
        .route("/api/compare", get(compare_handler))
        .route("/api/labels", get(labels_handler))
        .route("/api/health", get(health_handler))
        .layer(DefaultBodyLimit::max(config.body_limit))
        .with_state(state);
    match config.static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.route("/", get(|| async { Html(PLACEHOLDER_INDEX) })),
    }
}

const PLACEHOLDER_INDEX: &str = "<!doctype html><title>camlens</title>\
<p>camlens API is running. Start the server with <code>--static-dir</code> to serve the browser app.</p>";

#[derive(Debug)]
pub enum ApiError {
    BadRequest(String),
    NotFound(String),
    Internal(String),
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownCapture(_) => ApiError::NotFound(e.to_string()),
            Error::Decode(_) | Error::UnknownTag(_) | Error::InvalidRequest(_) => {
                ApiError::BadRequest(e.to_string())
            }
            other => ApiError::Internal(other.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        match self {
            ApiError::BadRequest(msg) => {
                (StatusCode::BAD_REQUEST, Json(json!({ "error": msg }))).into_response()
            }
            ApiError::NotFound(msg) => {
                (StatusCode::NOT_FOUND, Json(json!({ "error": msg }))).into_response()
            }
            ApiError::Internal(msg) => {
                let id = uuid::Uuid::new_v4().to_string();
                tracing::error!(error_id = %id, "internal error: {msg}");
                (
                    StatusCode::INTERNAL_SERVER_ERROR,
                    Json(json!({ "error": "internal error", "id": id })),
                )
                    .into_response()
            }
        }
    }
}

type ApiResult<T> = Result<T, ApiError>;

#[derive(Debug, Deserialize)]
struct ClassifyQuery {
    threshold: Option<f32>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ClassifyResponse {
    pub capture_id: String,
    #[serde(flatten)]
    pub payload: ClassifyPayload,
    pub threshold: f32,
    /// Cells at or above `threshold`, one grid per prediction.
    pub masks: Vec<Vec<bool>>,
}

async fn classify_handler(
    State(state): State<AppState>,
    Query(query): Query<ClassifyQuery>,
    body: Bytes,
) -> ApiResult<Json<ClassifyResponse>> {
    let threshold = query.threshold.unwrap_or(DEFAULT_THRESHOLD);
    if !(0.0..=1.0).contains(&threshold) {
        return Err(ApiError::BadRequest(format!(
            "threshold must lie in [0, 1], got {threshold}"
        )));
    }
    let response = tokio::task::spawn_blocking(move || -> Result<ClassifyResponse, Error> {
        let format = ImageFormat::detect(&body);
        let image = decode_image(&body)?;
        let result = classify(&state.model, &image, DEFAULT_TOP_K)?;
        let payload = result.payload(state.model.cam_grid());
        let masks = result
            .cams
            .iter()
            .map(|c| threshold_mask(c, threshold).map(|m| m.cells))
            .collect::<camlens_core::Result<Vec<_>>>()?;
        let record = state.store.insert(NewCapture {
            image: &body,
            format: format.expect("decoded, so format is known"),
            grid: payload.grid,
            predictions: payload.predictions.clone(),
            cam_grids: payload.cams.clone(),
            probabilities: result.forward.probabilities.data().to_vec(),
        })?;
        Ok(ClassifyResponse {
            capture_id: record.id,
            payload,
            threshold,
            masks,
        })
    })
    .await
    .map_err(|e| ApiError::Internal(e.to_string()))??;
    Ok(Json(response))
}

#[derive(Debug, Deserialize)]
struct TagBody {
    tag: String,
    #[serde(default)]
    note: String,
}

async fn tag_handler(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Json(body): Json<TagBody>,
) -> ApiResult<Response> {
    // unknown ids win over unknown tags
    state.store.get(&id)?;
    let tag: Tag = body.tag.parse()?;
    let record = state.store.tag(&id, tag, &body.note)?;
    Ok(Json(record).into_response())
}

#[derive(Debug, Deserialize)]
struct ListQuery {
    tag: Option<String>,
}

async fn list_handler(
    State(state): State<AppState>,
    Query(query): Query<ListQuery>,
) -> ApiResult<Response> {
    let tag = query.tag.map(|t| t.parse::<Tag>()).transpose()?;
    Ok(Json(state.store.list(tag)).into_response())
}

async fn capture_handler(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<Response> {
    Ok(Json(state.store.get(&id)?).into_response())
}

async fn image_handler(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<Response> {
    let record = state.store.get(&id)?;
    let path = state.store.image_path(&record);
    let bytes = tokio::fs::read(&path)
        .await
        .map_err(|e| ApiError::Internal(format!("{}: {e}", path.display())))?;
    let mime = ImageFormat::detect(&bytes).map_or("application/octet-stream", |f| f.mime());
    Ok(([(header::CONTENT_TYPE, mime)], bytes).into_response())
}

#[derive(Debug, Deserialize)]
struct CompareQuery {
    a: String,
    b: String,
    class: usize,
}

async fn compare_handler(
    State(state): State<AppState>,
    Query(q): Query<CompareQuery>,
) -> ApiResult<Response> {
    let report = tokio::task::spawn_blocking(move || {
        compare_captures(&state.store, &state.model, &q.a, &q.b, q.class)
    })
    .await
    .map_err(|e| ApiError::Internal(e.to_string()))??;
    Ok(Json(report).into_response())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LabelsResponse {
    pub model: String,
    pub grid: GridDims,
    pub labels: Vec<String>,
}

async fn labels_handler(State(state): State<AppState>) -> Json<LabelsResponse> {
    let (h, w) = state.model.cam_grid();
    Json(LabelsResponse {
        model: state.model.manifest().name.clone(),
        grid: GridDims { h, w },
        labels: state.model.labels().to_vec(),
    })
}

async fn health_handler(State(state): State<AppState>) -> Json<serde_json::Value> {
    Json(json!({
        "status": "ok",
        "model": state.model.manifest().name,
        "captures": state.store.len(),
    }))
}
