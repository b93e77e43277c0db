//! Phase engine: append-only data objects, the snapshot/branch phase tree,
//! phase contracts, the phase registry and the pipeline runner.

mod data;
mod phase;
mod settings;

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

pub use data::{DataObject, Datum, SnapshotId, SnapshotStore, Value};
pub use phase::{audit_append_only, run_phase, Failure, Params, Phase, PhaseContext, PhaseContract, PhaseReport, PhaseStatus};
pub use settings::{parse_settings, serialize_settings, PhaseSpec, PipelineSpec, Settings, SettingsError};

use crate::debruijn::GraphError;
use crate::seq::SeqError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DataError {
    #[error("OverwriteViolation: key {0:?} is already present")]
    OverwriteViolation(String),
    #[error("MissingKey: {0:?}")]
    MissingKey(String),
    #[error("key {key:?} holds a {found} value of another type")]
    WrongKind { key: String, found: &'static str },
    #[error("UnknownSnapshot: {0}")]
    UnknownSnapshot(SnapshotId),
}

/// Errors a phase body may return; the runner turns them into a failed
/// [`PhaseReport`].
#[derive(Debug, Error)]
pub enum PhaseError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("BadParam {name}: {reason}")]
    BadParam { name: String, reason: String },
    #[error("{0}")]
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("UnknownPhase: {0}")]
    UnknownPhase(String),
    #[error("UnknownPipeline: {name} (available: {})", available.join(", "))]
    UnknownPipeline { name: String, available: Vec<String> },
}

/// Phases by fully qualified name. Lookup is exact and case-sensitive.
#[derive(Clone, Default)]
pub struct PhaseRegistry {
    phases: BTreeMap<String, Arc<dyn Phase>>,
}

impl PhaseRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register<P: Phase + 'static>(&mut self, phase: P) -> &mut Self {
        self.phases.insert(phase.name().to_string(), Arc::new(phase));
        self
    }

    pub fn resolve(&self, name: &str) -> Result<Arc<dyn Phase>, PipelineError> {
        self.phases
            .get(name)
            .cloned()
            .ok_or_else(|| PipelineError::UnknownPhase(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.phases.keys().map(String::as_str)
    }
}

impl std::fmt::Debug for PhaseRegistry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.phases.keys()).finish()
    }
}

/// Run every phase of `spec` in order, stopping after the first failed
/// report. All phase names are resolved before anything runs.
pub fn run_pipeline(
    registry: &PhaseRegistry,
    spec: &PipelineSpec,
    data: &mut DataObject,
) -> Result<Vec<PhaseReport>, PipelineError> {
    let resolved = spec
        .phases
        .iter()
        .map(|p| registry.resolve(&p.name).map(|phase| (phase, &p.params)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut reports = Vec::with_capacity(resolved.len());
    for (phase, params) in resolved {
        let report = run_phase(phase.as_ref(), data, params);
        let ok = report.is_ok();
        reports.push(report);
        if !ok {
            break;
        }
    }
    Ok(reports)
}
