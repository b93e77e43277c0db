use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize, Serializer};

use super::data::{downcast, DataObject, Datum, Value};
use super::{DataError, PhaseError};

/// Keys a phase needs before it runs and keys it guarantees afterwards.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PhaseContract {
    pub requires: BTreeSet<String>,
    pub provides: BTreeSet<String>,
}

impl PhaseContract {
    pub fn new<R, P>(requires: R, provides: P) -> Self
    where
        R: IntoIterator,
        R::Item: Into<String>,
        P: IntoIterator,
        P::Item: Into<String>,
    {
        PhaseContract {
            requires: requires.into_iter().map(Into::into).collect(),
            provides: provides.into_iter().map(Into::into).collect(),
        }
    }
}

/// Named string parameters, parsed on demand.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Params(BTreeMap<String, String>);

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: impl Into<String>, value: impl ToString) -> Self {
        self.set(name, value);
        self
    }

    pub fn set(&mut self, name: impl Into<String>, value: impl ToString) {
        self.0.insert(name.into(), value.to_string());
    }

    pub fn raw(&self, name: &str) -> Option<&str> {
        self.0.get(name).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, name: &str) -> Result<Option<T>, PhaseError> {
        match self.0.get(name) {
            None => Ok(None),
            Some(v) => v.trim().parse().map(Some).map_err(|_| PhaseError::BadParam {
                name: name.to_string(),
                reason: format!("cannot parse {v:?}"),
            }),
        }
    }

    /// `self` with every entry of `other` laid over it.
    pub fn overlay(&self, other: &Params) -> Params {
        let mut out = self.clone();
        out.0.extend(other.0.iter().map(|(k, v)| (k.clone(), v.clone())));
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<K: Into<String>, V: ToString> FromIterator<(K, V)> for Params {
    fn from_iter<I: IntoIterator<Item = (K, V)>>(iter: I) -> Self {
        let mut p = Params::new();
        for (k, v) in iter {
            p.set(k, v);
        }
        p
    }
}

/// A named processing step over the shared [`DataObject`].
pub trait Phase: Send + Sync {
    /// Fully qualified, case-sensitive name, e.g. `miniasm.ScanReadsPhase`.
    fn name(&self) -> &str;

    fn contract(&self) -> PhaseContract;

    fn default_params(&self) -> Params {
        Params::default()
    }

    fn run(&self, ctx: &mut PhaseContext<'_>) -> Result<(), PhaseError>;
}

/// What a running phase sees: read access to the data object, a staging
/// area for its additions, its parameters and a log.
pub struct PhaseContext<'a> {
    data: &'a DataObject,
    staged: BTreeMap<String, Value>,
    params: Params,
    log: Vec<String>,
}

impl<'a> PhaseContext<'a> {
    pub fn get(&self, key: &str) -> Result<&Value, DataError> {
        match self.staged.get(key) {
            Some(v) => Ok(v),
            None => self.data.get(key),
        }
    }

    pub fn get_as<T: Datum>(&self, key: &str) -> Result<&T, DataError> {
        downcast(key, self.get(key)?)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.get(key).is_ok()
    }

    pub fn put<T: Datum>(&mut self, key: impl Into<String>, value: T) -> Result<(), DataError> {
        self.put_value(key, Arc::new(value))
    }

    pub fn put_value(&mut self, key: impl Into<String>, value: Value) -> Result<(), DataError> {
        let key = key.into();
        if self.contains(&key) {
            return Err(DataError::OverwriteViolation(key));
        }
        self.staged.insert(key, value);
        Ok(())
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn log(&mut self, line: impl Into<String>) {
        self.log.push(line.into());
    }
}

/// Why a phase run failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    Precondition(Vec<String>),
    Postcondition(Vec<String>),
    Overwrite(String),
    /// The runner's post-run audit found a prior entry missing or replaced.
    AppendOnly(String),
    Error(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Precondition(keys) => write!(f, "precondition: {}", keys.join(", ")),
            Failure::Postcondition(keys) => write!(f, "postcondition: {}", keys.join(", ")),
            Failure::Overwrite(key) => write!(f, "OverwriteViolation: {key}"),
            Failure::AppendOnly(key) => write!(f, "append-only violation: {key}"),
            Failure::Error(msg) => f.write_str(msg),
        }
    }
}

impl Serialize for Failure {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "state", content = "reason", rename_all = "lowercase")]
pub enum PhaseStatus {
    Ok,
    Failed(Failure),
}

impl PhaseStatus {
    pub fn is_ok(&self) -> bool {
        matches!(self, PhaseStatus::Ok)
    }
}

impl fmt::Display for PhaseStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhaseStatus::Ok => f.write_str("ok"),
            PhaseStatus::Failed(why) => write!(f, "failed({why})"),
        }
    }
}

/// Execution record of one phase run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PhaseReport {
    pub phase_name: String,
    /// Milliseconds since the Unix epoch.
    pub started_at: u64,
    pub wall_millis: u64,
    pub keys_added: Vec<String>,
    pub log: Vec<String>,
    pub status: PhaseStatus,
}

impl PhaseReport {
    /// A report for keys seeded outside any phase.
    pub fn seeded(name: impl Into<String>, keys: Vec<String>) -> Self {
        PhaseReport {
            phase_name: name.into(),
            started_at: unix_millis(),
            wall_millis: 0,
            keys_added: keys,
            log: Vec::new(),
            status: PhaseStatus::Ok,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status.is_ok()
    }
}

impl fmt::Display for PhaseReport {
    /// `<phaseName> <status> <wallMillis>ms added=[keys]`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {}ms added=[{}]",
            self.phase_name,
            self.status,
            self.wall_millis,
            self.keys_added.join(",")
        )
    }
}

fn unix_millis() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

/// Run one phase against `data`.
///
/// Preconditions are checked first. The phase writes into a staging area
/// that is committed only if it succeeds and every promised key is then
/// visible; on any failure `data` keeps its entries. After the commit the
/// runner audits that every previously visible entry is still present and
/// still the same value. The report is appended to the lineage either way.
pub fn run_phase(phase: &dyn Phase, data: &mut DataObject, overrides: &Params) -> PhaseReport {
    let started_at = unix_millis();
    let clock = Instant::now();
    let contract = phase.contract();
    let mut report = PhaseReport {
        phase_name: phase.name().to_string(),
        started_at,
        wall_millis: 0,
        keys_added: Vec::new(),
        log: Vec::new(),
        status: PhaseStatus::Ok,
    };

    let missing: Vec<String> = contract
        .requires
        .iter()
        .filter(|k| !data.contains(k))
        .cloned()
        .collect();
    if !missing.is_empty() {
        report.status = PhaseStatus::Failed(Failure::Precondition(missing));
        report.wall_millis = clock.elapsed().as_millis() as u64;
        data.record(report.clone());
        return report;
    }

    let before: Vec<(String, Value)> = data.entries().map(|(k, v)| (k.to_string(), v.clone())).collect();
    let mut ctx = PhaseContext {
        data,
        staged: BTreeMap::new(),
        params: phase.default_params().overlay(overrides),
        log: Vec::new(),
    };
    let outcome = phase.run(&mut ctx);
    let PhaseContext { staged, log, .. } = ctx;
    report.log = log;

    let status = match outcome {
        Err(PhaseError::Data(DataError::OverwriteViolation(key))) => PhaseStatus::Failed(Failure::Overwrite(key)),
        Err(e) => PhaseStatus::Failed(Failure::Error(e.to_string())),
        Ok(()) => {
            let unmet: Vec<String> = contract
                .provides
                .iter()
                .filter(|k| !staged.contains_key(*k) && !data.contains(k))
                .cloned()
                .collect();
            if unmet.is_empty() {
                commit(data, staged, &before, &mut report)
            } else {
                PhaseStatus::Failed(Failure::Postcondition(unmet))
            }
        }
    };
    report.status = status;
    report.wall_millis = clock.elapsed().as_millis() as u64;
    data.record(report.clone());
    report
}

fn commit(
    data: &mut DataObject,
    staged: BTreeMap<String, Value>,
    before: &[(String, Value)],
    report: &mut PhaseReport,
) -> PhaseStatus {
    for (key, value) in staged {
        if let Err(DataError::OverwriteViolation(k)) = data.put_value(key.clone(), value) {
            return PhaseStatus::Failed(Failure::Overwrite(k));
        }
        report.keys_added.push(key);
    }
    match audit_append_only(before, data) {
        Some(key) => PhaseStatus::Failed(Failure::AppendOnly(key)),
        None => PhaseStatus::Ok,
    }
}

/// First key of `before` that is no longer visible in `after` or no longer
/// refers to the same value.
pub fn audit_append_only(before: &[(String, Value)], after: &DataObject) -> Option<String> {
    before
        .iter()
        .find(|(k, v)| after.get(k).map_or(true, |now| !Arc::ptr_eq(v, now)))
        .map(|(k, _)| k.clone())
}
