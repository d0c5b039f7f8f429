//! HTTP and WebSocket routing.

use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use gazeguide_core::geometry::write_obj;
use tokio::net::TcpListener;
use tower_http::services::ServeDir;

use crate::registry::ScenarioRegistry;
use crate::session::Connection;

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub registry: Arc<ScenarioRegistry>,
    /// Directory of the built UI, served for every path the API does not claim.
    pub static_dir: Option<PathBuf>,
}

pub fn router(config: ServerConfig) -> Router {
    let api = Router::new()
        .route("/session", get(session_socket))
        .route("/scenarios", get(list_scenarios))
        .route("/scenarios/:id", get(one_scenario))
        .route("/scenarios/:id/world.obj", get(world_mesh))
        .with_state(config.registry);
    match config.static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

/// Serves until the listener fails.
pub async fn serve(listener: TcpListener, config: ServerConfig) -> std::io::Result<()> {
    axum::serve(listener, router(config)).await
}

async fn list_scenarios(State(registry): State<Arc<ScenarioRegistry>>) -> Response {
    Json(registry.summaries()).into_response()
}

fn not_found(id: &str) -> Response {
    let body = serde_json::json!({ "code": "scenario_not_found", "detail": format!("no scenario named {id:?}") });
    (StatusCode::NOT_FOUND, Json(body)).into_response()
}

async fn one_scenario(State(registry): State<Arc<ScenarioRegistry>>, Path(id): Path<String>) -> Response {
    match registry.get(&id) {
        Some(e) => Json(e.summary()).into_response(),
        None => not_found(&id),
    }
}

async fn world_mesh(State(registry): State<Arc<ScenarioRegistry>>, Path(id): Path<String>) -> Response {
    match registry.get(&id) {
        Some(e) => {
            let text = write_obj(e.world.mesh(), &format!("world mesh of scenario {id}"));
            ([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], text).into_response()
        }
        None => not_found(&id),
    }
}

async fn session_socket(ws: WebSocketUpgrade, State(registry): State<Arc<ScenarioRegistry>>) -> Response {
    ws.on_upgrade(move |socket| run_session(socket, registry))
}

async fn run_session(mut socket: WebSocket, registry: Arc<ScenarioRegistry>) {
    let mut conn = Connection::new(registry);
    while let Some(incoming) = socket.recv().await {
        let reply = match incoming {
            Ok(Message::Text(text)) => conn.handle_text(&text),
            Ok(Message::Binary(_)) => conn.protocol_error("binary messages are not supported"),
            Ok(Message::Close(_)) | Err(_) => break,
            Ok(_) => continue,
        };
        for msg in &reply.messages {
            let text = serde_json::to_string(msg).expect("server messages serialize");
            if socket.send(Message::Text(text)).await.is_err() {
                return;
            }
        }
        if reply.close {
            let _ = socket.send(Message::Close(None)).await;
            break;
        }
    }
    tracing::debug!("session closed");
}
