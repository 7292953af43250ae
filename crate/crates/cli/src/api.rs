//! HTTP JSON API over a loaded, immutable model.

use std::future::Future;
use std::io;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;

use smcqa::model::ClusterReport;
use smcqa::stats::MEMBER_THRESHOLD;
use smcqa::{answer, Model, Summary};

struct AppState {
    model: Model,
    clusters: Vec<ClusterReport>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AskRequest {
    question: String,
    top_k: Option<usize>,
}

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    (status, Json(json!({ "error": message.into() }))).into_response()
}

pub fn router(model: Model) -> Router {
    let clusters = model.cluster_reports(MEMBER_THRESHOLD);
    let state = Arc::new(AppState { model, clusters });
    Router::new()
        .route("/health", get(health))
        .route("/model", get(summary))
        .route("/clusters", get(clusters_report))
        .route("/ask", post(ask))
        .method_not_allowed_fallback(|| async {
            error(StatusCode::METHOD_NOT_ALLOWED, "method not allowed")
        })
        .fallback(|| async { error(StatusCode::NOT_FOUND, "not found") })
        .with_state(state)
}

async fn health() -> Json<serde_json::Value> {
    Json(json!({ "status": "ok" }))
}

async fn summary(State(state): State<Arc<AppState>>) -> Json<Summary> {
    Json(state.model.summary.clone())
}

async fn clusters_report(State(state): State<Arc<AppState>>) -> Json<Vec<ClusterReport>> {
    Json(state.clusters.clone())
}

async fn ask(
    State(state): State<Arc<AppState>>,
    body: Result<Json<AskRequest>, JsonRejection>,
) -> Response {
    let request = match body {
        Ok(Json(request)) => request,
        Err(rejection) => return error(rejection.status(), rejection.body_text()),
    };
    let top_k = request.top_k.unwrap_or(state.model.config.top_k);
    if top_k == 0 {
        return error(StatusCode::UNPROCESSABLE_ENTITY, "top_k must be at least 1");
    }
    log::debug!("ask {:?} (top_k {top_k})", request.question);
    Json(answer(&request.question, &state.model, top_k)).into_response()
}

/// Serves until `shutdown` resolves.
pub async fn serve(
    model: Model,
    addr: SocketAddr,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(model))
        .with_graceful_shutdown(shutdown)
        .await
}

/// Resolves on Ctrl-C.
pub async fn interrupt() {
    if let Err(err) = tokio::signal::ctrl_c().await {
        log::error!("cannot listen for interrupt: {err}");
        std::future::pending::<()>().await;
    }
    log::info!("shutting down");
}
