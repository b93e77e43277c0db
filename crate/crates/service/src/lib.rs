//! HTTP/JSON session API over the assembler: create sessions, run phases
//! one at a time or as named pipelines, branch the phase tree and inspect
//! intermediate results.

mod api;
mod error;
mod openapi;
mod state;

use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Duration;

use axum::http::HeaderValue;
use axum::routing::{get, post};
use axum::Router;
use tower_http::cors::{Any, CorsLayer};

pub use api::DEFAULT_PAGE;
pub use error::ApiError;
pub use openapi::document as openapi_document;
pub use state::{AppState, ServiceConfig, Session, SessionState, SessionView};

pub fn router(state: Arc<AppState>) -> Router {
    let cors = match state.config.cors_origin.as_deref().map(HeaderValue::from_str) {
        Some(Ok(origin)) => CorsLayer::new().allow_origin(origin),
        _ => CorsLayer::new().allow_origin(Any),
    }
    .allow_methods(Any)
    .allow_headers(Any);

    Router::new()
        .route("/sessions", post(api::create_session).get(api::list_sessions))
        .route("/sessions/{id}", get(api::get_session))
        .route("/sessions/{id}/run", post(api::run))
        .route("/sessions/{id}/runPipeline", post(api::run_pipeline))
        .route("/sessions/{id}/branch", post(api::branch_session))
        .route("/sessions/{id}/contigs", get(api::contigs))
        .route("/sessions/{id}/contigs.fa", get(api::contigs_fasta))
        .route("/sessions/{id}/repeats", get(api::repeats))
        .route("/sessions/{id}/coverage", get(api::coverage))
        .route("/pipelines", get(api::pipelines))
        .route("/phases", get(api::phases))
        .route("/openapi.json", get(api::openapi))
        .layer(cors)
        .with_state(state)
}

/// Periodically drop idle sessions.
pub fn spawn_expiry(state: Arc<AppState>) -> tokio::task::JoinHandle<()> {
    let every = (state.config.idle_timeout / 4).clamp(Duration::from_millis(10), Duration::from_secs(60));
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(every);
        loop {
            tick.tick().await;
            for id in state.expire_idle() {
                log::info!("session {id} expired");
            }
        }
    })
}

/// Serve until the process is stopped.
pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    let state = Arc::new(AppState::new(config));
    spawn_expiry(state.clone());
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}
