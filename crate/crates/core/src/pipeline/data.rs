use std::any::Any;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use super::{DataError, PhaseReport};

/// A value that can live in a [`DataObject`]. Values are immutable once
/// stored and shared between branches by reference.
pub trait Datum: Any + Send + Sync + fmt::Debug {
    /// Short name of the value kind, e.g. `"graph"`.
    fn kind(&self) -> &'static str;

    /// Summary statistics for inspection endpoints.
    fn summary(&self) -> serde_json::Value {
        serde_json::Value::Null
    }
}

pub type Value = Arc<dyn Datum>;

macro_rules! scalar_datum {
    ($($t:ty => $kind:literal),* $(,)?) => {
        $(impl Datum for $t {
            fn kind(&self) -> &'static str {
                $kind
            }

            fn summary(&self) -> serde_json::Value {
                serde_json::json!(self)
            }
        })*
    };
}

scalar_datum!(i64 => "scalar", u64 => "scalar", f64 => "scalar", bool => "scalar", String => "text");

#[derive(Debug)]
struct Frozen {
    entries: BTreeMap<String, Value>,
    parent: Option<Arc<Frozen>>,
}

impl Frozen {
    fn get(&self, key: &str) -> Option<&Value> {
        let mut cur = Some(self);
        while let Some(f) = cur {
            if let Some(v) = f.entries.get(key) {
                return Some(v);
            }
            cur = f.parent.as_deref();
        }
        None
    }
}

/// The shared, append-only store passed from phase to phase.
///
/// Visible entries are this object's own entries plus those of the
/// snapshot it was branched from. A key, once visible, can neither be
/// replaced nor removed.
#[derive(Debug, Clone, Default)]
pub struct DataObject {
    own: BTreeMap<String, Value>,
    parent: Option<Arc<Frozen>>,
    origin: Option<SnapshotId>,
    lineage: Vec<PhaseReport>,
}

impl DataObject {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, key: &str) -> Result<&Value, DataError> {
        self.own
            .get(key)
            .or_else(|| self.parent.as_ref().and_then(|p| p.get(key)))
            .ok_or_else(|| DataError::MissingKey(key.to_string()))
    }

    /// Typed access; fails with `WrongKind` if the stored value is of a
    /// different type.
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
        self.own.insert(key, value);
        Ok(())
    }

    /// All visible keys, sorted.
    pub fn keys(&self) -> BTreeSet<String> {
        self.entries().map(|(k, _)| k.to_string()).collect()
    }

    /// All visible entries, sorted by key.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &Value)> {
        let mut all: BTreeMap<&str, &Value> = BTreeMap::new();
        let mut cur = self.parent.as_deref();
        while let Some(f) = cur {
            for (k, v) in &f.entries {
                all.entry(k).or_insert(v);
            }
            cur = f.parent.as_deref();
        }
        for (k, v) in &self.own {
            all.insert(k, v);
        }
        all.into_iter()
    }

    /// Keys added directly to this object rather than inherited.
    pub fn own_keys(&self) -> impl Iterator<Item = &str> {
        self.own.keys().map(String::as_str)
    }

    /// The snapshot this object was branched from, if any.
    pub fn origin(&self) -> Option<SnapshotId> {
        self.origin
    }

    pub fn lineage(&self) -> &[PhaseReport] {
        &self.lineage
    }

    /// Append a report to the lineage. The runner does this for every
    /// phase; applications use it to log seeding of initial keys.
    pub fn record(&mut self, report: PhaseReport) {
        self.lineage.push(report);
    }

    fn freeze(&self) -> Arc<Frozen> {
        Arc::new(Frozen {
            entries: self.own.clone(),
            parent: self.parent.clone(),
        })
    }
}

pub(crate) fn downcast<'a, T: Datum>(key: &str, v: &'a Value) -> Result<&'a T, DataError> {
    let any: &dyn Any = v.as_ref();
    any.downcast_ref::<T>().ok_or_else(|| DataError::WrongKind {
        key: key.to_string(),
        found: v.kind(),
    })
}

/// Identifier of a frozen state in the phase tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SnapshotId(pub u64);

impl fmt::Display for SnapshotId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "snap-{}", self.0)
    }
}

#[derive(Debug)]
struct Snapshot {
    frozen: Arc<Frozen>,
    lineage: Vec<PhaseReport>,
}

/// Registry of frozen [`DataObject`] states. Branching the same snapshot
/// any number of times yields independent children.
#[derive(Debug, Default)]
pub struct SnapshotStore {
    snapshots: RwLock<HashMap<SnapshotId, Snapshot>>,
    next: AtomicU64,
}

impl SnapshotStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Freeze the current visible state of `d`. Later puts to `d` do not
    /// affect the snapshot.
    pub fn snapshot(&self, d: &DataObject) -> SnapshotId {
        let id = SnapshotId(self.next.fetch_add(1, Ordering::Relaxed));
        let snap = Snapshot {
            frozen: d.freeze(),
            lineage: d.lineage.clone(),
        };
        self.snapshots.write().unwrap().insert(id, snap);
        id
    }

    pub fn branch(&self, id: SnapshotId) -> Result<DataObject, DataError> {
        let snaps = self.snapshots.read().unwrap();
        let snap = snaps.get(&id).ok_or(DataError::UnknownSnapshot(id))?;
        Ok(DataObject {
            own: BTreeMap::new(),
            parent: Some(snap.frozen.clone()),
            origin: Some(id),
            lineage: snap.lineage.clone(),
        })
    }

    pub fn len(&self) -> usize {
        self.snapshots.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Drop a snapshot; children already branched from it keep their data.
    pub fn release(&self, id: SnapshotId) -> bool {
        self.snapshots.write().unwrap().remove(&id).is_some()
    }
}
