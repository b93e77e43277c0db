use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::Json;
use miniasm_core::assembler::{
    init_data, keys, write_contigs, AssemblyError, AssemblySettings, ContigSet, RepeatSet, DEFAULT_K,
    DEFAULT_PIPELINE,
};
use miniasm_core::debruijn::CoverageStats;
use miniasm_core::pipeline::{run_phase, Params, PhaseReport};
use serde::Deserialize;
use serde_json::{json, Value};
use tokio::task::JoinHandle;

use crate::error::ApiError;
use crate::state::{AppState, Session};

type App = State<Arc<AppState>>;

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CreateSession {
    #[serde(alias = "inputPath")]
    input: Option<String>,
    k: Option<usize>,
    cut: Option<u32>,
    max_tip_len: Option<usize>,
    #[serde(alias = "pipelineName")]
    pipeline: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunRequest {
    phase: String,
    #[serde(default)]
    params: BTreeMap<String, Value>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunPipelineRequest {
    name: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ContigQuery {
    sort: Option<String>,
    limit: Option<usize>,
    offset: Option<usize>,
    include_seq: Option<bool>,
}

pub const DEFAULT_PAGE: usize = 100;

fn inspect(session: &Session, app: &AppState) -> Value {
    let view = session.view();
    let keys: Vec<Value> = view
        .data
        .entries()
        .map(|(k, v)| json!({ "key": k, "kind": v.kind(), "summary": v.summary() }))
        .collect();
    let children: Vec<&String> = view.children.iter().filter(|c| app.exists(c)).collect();
    json!({
        "id": session.id,
        "parent": session.parent,
        "children": children,
        "createdAt": session.created_at,
        "state": view.state,
        "origin": view.data.origin().map(|o| o.to_string()),
        "keys": keys,
        "lineage": view.data.lineage(),
    })
}

pub async fn create_session(
    State(app): App,
    body: Result<Json<CreateSession>, JsonRejection>,
) -> Result<(StatusCode, Json<Value>), ApiError> {
    let req = body?.0;
    let mut settings = AssemblySettings::new(req.input.unwrap_or_default());
    settings.k = req.k.unwrap_or(DEFAULT_K);
    settings.cut = req.cut.unwrap_or(0);
    settings.max_tip_len = req.max_tip_len;
    settings.pipeline_name = req.pipeline.unwrap_or_else(|| DEFAULT_PIPELINE.to_string());
    let data = init_data(settings).map_err(|e| {
        let code = match e {
            AssemblyError::MissingInput => "MissingInput",
            AssemblyError::BadK(_) => "BadK",
            AssemblyError::BadParam { .. } => "BadParam",
        };
        ApiError::bad_request(code, e.to_string())
    })?;
    let session = app.insert(data);
    log::info!("created session {}", session.id);
    Ok((StatusCode::CREATED, Json(inspect(&session, &app))))
}

pub async fn list_sessions(State(app): App) -> Json<Value> {
    let list: Vec<Value> = app
        .list()
        .iter()
        .map(|s| {
            json!({
                "id": s.id,
                "parent": s.parent,
                "createdAt": s.created_at,
                "state": s.state(),
            })
        })
        .collect();
    Json(Value::Array(list))
}

pub async fn get_session(State(app): App, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let s = app.get(&id)?;
    Ok(Json(inspect(&s, &app)))
}

pub async fn branch_session(State(app): App, Path(id): Path<String>) -> Result<(StatusCode, Json<Value>), ApiError> {
    let (child, _) = app.branch(&id)?;
    log::info!("branched session {} from {id}", child.id);
    Ok((StatusCode::CREATED, Json(inspect(&child, &app))))
}

fn params_from_json(raw: BTreeMap<String, Value>) -> Params {
    raw.into_iter()
        .map(|(k, v)| {
            let s = match v {
                Value::String(s) => s,
                other => other.to_string(),
            };
            (k, s)
        })
        .collect()
}

/// Wait briefly for a run; answer 200 with its result or 202 if it is
/// still going.
async fn respond<T: serde::Serialize>(
    app: &AppState,
    session: &Session,
    task: JoinHandle<Option<T>>,
) -> Result<Response, ApiError> {
    match tokio::time::timeout(app.config.async_threshold, task).await {
        Ok(Ok(Some(result))) => Ok(Json(result).into_response()),
        Ok(_) => Err(ApiError::new(
            StatusCode::INTERNAL_SERVER_ERROR,
            "PhasePanicked",
            "the phase aborted unexpectedly; session data left unchanged",
        )),
        Err(_) => Ok((
            StatusCode::ACCEPTED,
            Json(json!({ "id": session.id, "state": session.state() })),
        )
            .into_response()),
    }
}

pub async fn run(
    State(app): App,
    Path(id): Path<String>,
    body: Result<Json<RunRequest>, JsonRejection>,
) -> Result<Response, ApiError> {
    let session = app.get(&id)?;
    let req = body?.0;
    let phase = app
        .registry
        .resolve(&req.phase)
        .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "UnknownPhase", e.to_string()))?;
    let params = params_from_json(req.params);
    let mut data = session.begin(phase.name())?;
    let s = session.clone();
    let task = tokio::task::spawn_blocking(move || {
        let outcome = catch_unwind(AssertUnwindSafe(|| run_phase(phase.as_ref(), &mut data, &params)));
        match outcome {
            Ok(report) => {
                log::info!("session {}: {report}", s.id);
                s.finish(Some(data));
                Some(report)
            }
            Err(_) => {
                s.finish(None);
                None
            }
        }
    });
    respond(&app, &session, task).await
}

pub async fn run_pipeline(
    State(app): App,
    Path(id): Path<String>,
    body: Option<Json<RunPipelineRequest>>,
) -> Result<Response, ApiError> {
    let session = app.get(&id)?;
    let req = body.map(|b| b.0).unwrap_or_default();
    let name = match req.name {
        Some(n) => n,
        None => session
            .data()
            .get_as::<AssemblySettings>(keys::SETTINGS)
            .map(|s| s.pipeline_name.clone())
            .unwrap_or_else(|_| DEFAULT_PIPELINE.to_string()),
    };
    let spec = app.config.settings.pipeline(&name).cloned().ok_or_else(|| {
        ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "UnknownPipeline",
            format!("no pipeline {name:?} (available: {})", app.config.settings.names().join(", ")),
        )
    })?;
    let phases = spec
        .phases
        .iter()
        .map(|p| app.registry.resolve(&p.name).map(|ph| (ph, p.params.clone())))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "UnknownPhase", e.to_string()))?;
    let first = phases.first().map(|(p, _)| p.name().to_string()).unwrap_or_default();
    let mut data = session.begin(&first)?;
    let s = session.clone();
    let task = tokio::task::spawn_blocking(move || {
        let outcome = catch_unwind(AssertUnwindSafe(|| {
            let mut reports: Vec<PhaseReport> = Vec::new();
            for (i, (phase, params)) in phases.iter().enumerate() {
                let report = run_phase(phase.as_ref(), &mut data, params);
                let ok = report.is_ok();
                log::info!("session {}: {report}", s.id);
                reports.push(report);
                if !ok {
                    break;
                }
                if let Some((next, _)) = phases.get(i + 1) {
                    s.progress(&data, next.name());
                }
            }
            reports
        }));
        match outcome {
            Ok(reports) => {
                s.finish(Some(data));
                Some(reports)
            }
            Err(_) => {
                s.finish(None);
                None
            }
        }
    });
    respond(&app, &session, task).await
}

pub async fn contigs(
    State(app): App,
    Path(id): Path<String>,
    query: Result<Query<ContigQuery>, QueryRejection>,
) -> Result<Json<Value>, ApiError> {
    let q = query?.0;
    let data = app.get(&id)?.data();
    let set = data
        .get_as::<ContigSet>(keys::CONTIGS)
        .map_err(|_| ApiError::not_available("ContigsNotAvailable", "run miniasm.FindPathsPhase first"))?;
    let mut order: Vec<&miniasm_core::assembler::Contig> = set.0.iter().collect();
    match q.sort.as_deref() {
        None | Some("id") => {}
        Some("size") => order.sort_by(|a, b| b.size().cmp(&a.size()).then(a.id.cmp(&b.id))),
        Some(other) => {
            return Err(ApiError::bad_request(
                "BadRequest",
                format!("sort must be 'size' or 'id', got {other:?}"),
            ))
        }
    }
    let offset = q.offset.unwrap_or(0);
    let limit = q.limit.unwrap_or(DEFAULT_PAGE);
    let include_seq = q.include_seq.unwrap_or(false);
    let mut budget = app.config.seq_cap;
    let mut capped = false;
    let page: Vec<Value> = order
        .iter()
        .skip(offset)
        .take(limit)
        .map(|c| {
            let mut v = json!({ "id": c.id, "size": c.size(), "avgCoverage": c.avg_coverage });
            if include_seq {
                if c.size() <= budget && !capped {
                    budget -= c.size();
                    v["seq"] = json!(c.seq.decode());
                } else {
                    capped = true;
                }
            }
            v
        })
        .collect();
    Ok(Json(json!({
        "total": set.0.len(),
        "offset": offset,
        "limit": limit,
        "seqCapped": capped,
        "contigs": page,
    })))
}

pub async fn contigs_fasta(State(app): App, Path(id): Path<String>) -> Result<Response, ApiError> {
    let data = app.get(&id)?.data();
    let set = data
        .get_as::<ContigSet>(keys::CONTIGS)
        .map_err(|_| ApiError::not_available("ContigsNotAvailable", "run miniasm.FindPathsPhase first"))?;
    let mut out = Vec::new();
    write_contigs(&mut out, &set.0)
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", e.to_string()))?;
    Ok(([(header::CONTENT_TYPE, "text/x-fasta; charset=utf-8")], out).into_response())
}

pub async fn repeats(State(app): App, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let data = app.get(&id)?.data();
    let hits = data
        .get_as::<RepeatSet>(keys::REPEATS)
        .map_err(|_| ApiError::not_available("RepeatsNotAvailable", "run miniasm.FindRepeatsPhase first"))?;
    Ok(Json(json!(hits.0)))
}

pub async fn coverage(State(app): App, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let data = app.get(&id)?.data();
    let stats = data
        .get_as::<CoverageStats>(keys::COVERAGE)
        .map_err(|_| ApiError::not_available("CoverageNotAvailable", "run miniasm.ComputeCoveragePhase first"))?;
    Ok(Json(json!(stats)))
}

pub async fn pipelines(State(app): App) -> Json<Value> {
    let list: Vec<Value> = app
        .config
        .settings
        .pipelines
        .iter()
        .map(|p| json!({ "name": p.name, "phases": p.phase_names().collect::<Vec<_>>() }))
        .collect();
    Json(Value::Array(list))
}

pub async fn phases(State(app): App) -> Json<Value> {
    let list: Vec<Value> = app
        .registry
        .names()
        .filter_map(|n| app.registry.resolve(n).ok())
        .map(|p| {
            let c = p.contract();
            json!({
                "name": p.name(),
                "requires": c.requires,
                "provides": c.provides,
                "defaultParams": p.default_params(),
            })
        })
        .collect();
    Json(Value::Array(list))
}

pub async fn openapi() -> Json<Value> {
    Json(crate::openapi::document())
}
