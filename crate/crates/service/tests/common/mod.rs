#![allow(dead_code)]

use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use miniasm_service::{router, AppState, ServiceConfig};
use serde_json::Value;
use tower::ServiceExt;

pub struct Client {
    pub app: Router,
    pub state: Arc<AppState>,
}

impl Client {
    pub fn new(config: ServiceConfig) -> Self {
        Self::from_state(Arc::new(AppState::new(config)))
    }

    pub fn from_state(state: Arc<AppState>) -> Self {
        Client {
            app: router(state.clone()),
            state,
        }
    }

    pub async fn raw(&self, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Vec<u8>) {
        let mut req = Request::builder().method(method).uri(uri);
        let body = match body {
            Some(v) => {
                req = req.header("content-type", "application/json");
                Body::from(v.to_string())
            }
            None => Body::empty(),
        };
        let resp = self.app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
        let status = resp.status();
        let bytes = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
        (status, bytes)
    }

    pub async fn call(&self, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
        let (status, bytes) = self.raw(method, uri, body).await;
        let v = if bytes.is_empty() {
            Value::Null
        } else {
            serde_json::from_slice(&bytes).unwrap_or_else(|_| Value::String(String::from_utf8_lossy(&bytes).into()))
        };
        (status, v)
    }

    pub async fn get(&self, uri: &str) -> (StatusCode, Value) {
        self.call("GET", uri, None).await
    }

    pub async fn post(&self, uri: &str, body: Value) -> (StatusCode, Value) {
        self.call("POST", uri, Some(body)).await
    }

    /// Create a session and return its id.
    pub async fn session(&self, body: Value) -> String {
        let (status, v) = self.post("/sessions", body).await;
        assert_eq!(status, StatusCode::CREATED, "{v}");
        v["id"].as_str().unwrap().to_string()
    }

    pub async fn run(&self, id: &str, phase: &str, params: Value) -> (StatusCode, Value) {
        self.post(&format!("/sessions/{id}/run"), serde_json::json!({ "phase": phase, "params": params }))
            .await
    }

    /// Run a phase that must complete with status ok.
    pub async fn run_ok(&self, id: &str, phase: &str) -> Value {
        let (status, report) = self.run(id, phase, serde_json::json!({})).await;
        assert_eq!(status, StatusCode::OK, "{report}");
        assert_eq!(report["status"]["state"], "ok", "{report}");
        report
    }

    pub async fn branch(&self, id: &str) -> String {
        let (status, v) = self.call("POST", &format!("/sessions/{id}/branch"), None).await;
        assert_eq!(status, StatusCode::CREATED, "{v}");
        v["id"].as_str().unwrap().to_string()
    }

    pub async fn inspect(&self, id: &str) -> Value {
        let (status, v) = self.get(&format!("/sessions/{id}")).await;
        assert_eq!(status, StatusCode::OK, "{v}");
        v
    }
}

/// An inspect() body without wall-clock fields.
pub fn normalized(mut v: Value) -> Value {
    if let Some(lineage) = v["lineage"].as_array_mut() {
        for r in lineage {
            let o = r.as_object_mut().unwrap();
            o.remove("startedAt");
            o.remove("wallMillis");
        }
    }
    v.as_object_mut().unwrap().remove("createdAt");
    v
}

pub fn key_names(v: &Value) -> Vec<String> {
    v["keys"]
        .as_array()
        .unwrap()
        .iter()
        .map(|k| k["key"].as_str().unwrap().to_string())
        .collect()
}

pub const SCAN: &str = "miniasm.ScanReadsPhase";
pub const BUILD: &str = "miniasm.BuildGraphPhase";
pub const TIPS: &str = "miniasm.FindTipsPhase";
pub const COVERAGE: &str = "miniasm.ComputeCoveragePhase";
pub const PATHS: &str = "miniasm.FindPathsPhase";
pub const REPEATS: &str = "miniasm.FindRepeatsPhase";
