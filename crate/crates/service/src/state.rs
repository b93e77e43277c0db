use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use axum::http::StatusCode;
use miniasm_core::assembler::{default_settings, phase_registry};
use miniasm_core::pipeline::{DataObject, PhaseRegistry, Settings, SnapshotId, SnapshotStore};
use serde::Serialize;

use crate::error::ApiError;

/// Service tunables.
#[derive(Debug, Clone)]
pub struct ServiceConfig {
    /// Pipelines offered by `GET /pipelines` and `runPipeline`.
    pub settings: Settings,
    /// Idle sessions older than this are dropped.
    pub idle_timeout: Duration,
    /// Runs still going after this long answer 202 and continue in the
    /// background.
    pub async_threshold: Duration,
    /// Maximum bases of sequence returned by one contig listing.
    pub seq_cap: usize,
    /// Allowed CORS origin; `None` allows any.
    pub cors_origin: Option<String>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            settings: default_settings(),
            idle_timeout: Duration::from_secs(3600),
            async_threshold: Duration::from_secs(2),
            seq_cap: 1_000_000,
            cors_origin: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "state", content = "phase", rename_all = "lowercase")]
pub enum SessionState {
    Idle,
    Running(String),
}

pub struct Session {
    pub id: String,
    pub parent: Option<String>,
    /// Milliseconds since the Unix epoch.
    pub created_at: u64,
    inner: Mutex<Inner>,
}

struct Inner {
    data: DataObject,
    state: SessionState,
    children: Vec<String>,
    last_used: Instant,
}

/// A consistent copy of a session taken under its lock.
pub struct SessionView {
    pub data: DataObject,
    pub state: SessionState,
    pub children: Vec<String>,
}

impl Session {
    fn new(id: String, parent: Option<String>, data: DataObject) -> Self {
        Session {
            id,
            parent,
            created_at: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_millis() as u64)
                .unwrap_or(0),
            inner: Mutex::new(Inner {
                data,
                state: SessionState::Idle,
                children: Vec::new(),
                last_used: Instant::now(),
            }),
        }
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, Inner> {
        // a panicking phase runs outside the lock, so poisoning is not expected
        self.inner.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn view(&self) -> SessionView {
        let mut g = self.lock();
        g.last_used = Instant::now();
        SessionView {
            data: g.data.clone(),
            state: g.state.clone(),
            children: g.children.clone(),
        }
    }

    pub fn data(&self) -> DataObject {
        self.view().data
    }

    pub fn state(&self) -> SessionState {
        self.lock().state.clone()
    }

    /// Mark the session running and hand out a copy of its data, or fail
    /// with 409 if a run is already in progress.
    pub fn begin(&self, phase: &str) -> Result<DataObject, ApiError> {
        let mut g = self.lock();
        if let SessionState::Running(p) = &g.state {
            return Err(ApiError::new(
                StatusCode::CONFLICT,
                "SessionBusy",
                format!("session {} is running {p}", self.id),
            ));
        }
        g.state = SessionState::Running(phase.to_string());
        g.last_used = Instant::now();
        Ok(g.data.clone())
    }

    /// Publish intermediate data while still running `next`.
    pub fn progress(&self, data: &DataObject, next: &str) {
        let mut g = self.lock();
        g.data = data.clone();
        g.state = SessionState::Running(next.to_string());
    }

    pub fn finish(&self, data: Option<DataObject>) {
        let mut g = self.lock();
        if let Some(d) = data {
            g.data = d;
        }
        g.state = SessionState::Idle;
        g.last_used = Instant::now();
    }
}

/// Shared service state: registry, configuration and live sessions.
pub struct AppState {
    pub config: ServiceConfig,
    pub registry: PhaseRegistry,
    sessions: RwLock<BTreeMap<String, Arc<Session>>>,
    snapshots: SnapshotStore,
    next_id: AtomicU64,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Self {
        Self::with_registry(config, phase_registry())
    }

    pub fn with_registry(config: ServiceConfig, registry: PhaseRegistry) -> Self {
        AppState {
            config,
            registry,
            sessions: RwLock::new(BTreeMap::new()),
            snapshots: SnapshotStore::new(),
            next_id: AtomicU64::new(1),
        }
    }

    fn fresh_id(&self) -> String {
        format!("s{}", self.next_id.fetch_add(1, Ordering::Relaxed))
    }

    pub fn insert(&self, data: DataObject) -> Arc<Session> {
        let s = Arc::new(Session::new(self.fresh_id(), None, data));
        self.sessions.write().unwrap().insert(s.id.clone(), s.clone());
        s
    }

    pub fn get(&self, id: &str) -> Result<Arc<Session>, ApiError> {
        self.sessions
            .read()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "UnknownSession", format!("no session {id}")))
    }

    pub fn list(&self) -> Vec<Arc<Session>> {
        self.sessions.read().unwrap().values().cloned().collect()
    }

    pub fn exists(&self, id: &str) -> bool {
        self.sessions.read().unwrap().contains_key(id)
    }

    /// New child session sharing every entry the parent has now.
    pub fn branch(&self, id: &str) -> Result<(Arc<Session>, SnapshotId), ApiError> {
        let parent = self.get(id)?;
        let snap = self.snapshots.snapshot(&parent.data());
        let data = self
            .snapshots
            .branch(snap)
            .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", e.to_string()))?;
        // the child keeps the frozen state alive by itself
        self.snapshots.release(snap);
        let child = Arc::new(Session::new(self.fresh_id(), Some(parent.id.clone()), data));
        parent.lock().children.push(child.id.clone());
        self.sessions.write().unwrap().insert(child.id.clone(), child.clone());
        Ok((child, snap))
    }

    /// Drop idle sessions unused for longer than the configured timeout.
    /// Returns the removed ids.
    pub fn expire_idle(&self) -> Vec<String> {
        let timeout = self.config.idle_timeout;
        let mut sessions = self.sessions.write().unwrap();
        let stale: Vec<String> = sessions
            .values()
            .filter(|s| {
                let g = s.lock();
                g.state == SessionState::Idle && g.last_used.elapsed() > timeout
            })
            .map(|s| s.id.clone())
            .collect();
        for id in &stale {
            sessions.remove(id);
        }
        stale
    }
}
