//! The assembler application: settings, the six phases that wire the
//! sequence and graph layers into pipelines, contig output and tandem
//! repeat detection.

mod contig;
mod phases;
mod repeats;

use std::collections::BTreeSet;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::debruijn::{CoverageStats, DeBruijnGraph};
use crate::pipeline::{DataObject, Datum, PhaseError, PhaseRegistry, PhaseReport, Settings};
use crate::seq::{validate_k, Kmer, Read};

pub use contig::{write_contig_file, write_contigs, Contig, RepeatHit, RENDER_PREFIX};
pub use phases::{
    BuildGraphPhase, ComputeCoveragePhase, FindPathsPhase, FindRepeatsPhase, FindTipsPhase, ScanReadsPhase,
};
pub use repeats::{check_repeat_params, find_repeats, Repeat, DEFAULT_MIN_MOTIF_LEN, DEFAULT_MIN_TOT_LEN};

/// Data object keys shared by the phases.
pub mod keys {
    pub const SETTINGS: &str = "settings";
    pub const READS: &str = "reads";
    pub const INPUT_FORMAT: &str = "inputFormat";
    pub const GRAPH: &str = "graph";
    pub const TIPS: &str = "tips";
    pub const COVERAGE: &str = "coverage";
    pub const CONTIGS: &str = "contigs";
    pub const REPEATS: &str = "repeats";
}

/// Name of the lineage entry that seeds `settings`.
pub const INIT_DATA: &str = "initData";

pub const DEFAULT_K: usize = 31;
pub const DEFAULT_PIPELINE: &str = "default";

/// Built-in pipelines, used when no settings file is given.
pub const DEFAULT_SETTINGS_XML: &str = r#"<settings>
  <pipeline name="default">
    <phase>miniasm.ScanReadsPhase</phase>
    <phase>miniasm.BuildGraphPhase</phase>
    <phase>miniasm.FindTipsPhase</phase>
    <phase>miniasm.ComputeCoveragePhase</phase>
    <phase>miniasm.FindPathsPhase</phase>
  </pipeline>
  <pipeline name="repeats">
    <phase>miniasm.ScanReadsPhase</phase>
    <phase>miniasm.BuildGraphPhase</phase>
    <phase>miniasm.FindTipsPhase</phase>
    <phase>miniasm.ComputeCoveragePhase</phase>
    <phase>miniasm.FindPathsPhase</phase>
    <phase>miniasm.FindRepeatsPhase</phase>
  </pipeline>
</settings>
"#;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssemblyError {
    #[error("MissingInput: an input path is required")]
    MissingInput,
    #[error("BadK: k must be odd and between 3 and 63, got {0}")]
    BadK(usize),
    #[error("BadParam {name}: {reason}")]
    BadParam { name: &'static str, reason: String },
}

impl From<AssemblyError> for PhaseError {
    fn from(e: AssemblyError) -> Self {
        match e {
            AssemblyError::BadParam { name, reason } => PhaseError::BadParam {
                name: name.to_string(),
                reason,
            },
            other => PhaseError::Failed(other.to_string()),
        }
    }
}

/// Run parameters of one assembly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct AssemblySettings {
    pub input_path: PathBuf,
    pub k: usize,
    /// Minimum node coverage for path extraction.
    pub cut: u32,
    /// Longest dead-end chain, in nodes, treated as a tip. `None` means `2k`.
    pub max_tip_len: Option<usize>,
    pub pipeline_name: String,
}

impl Default for AssemblySettings {
    fn default() -> Self {
        AssemblySettings {
            input_path: PathBuf::new(),
            k: DEFAULT_K,
            cut: 0,
            max_tip_len: None,
            pipeline_name: DEFAULT_PIPELINE.to_string(),
        }
    }
}

impl AssemblySettings {
    pub fn new(input: impl Into<PathBuf>) -> Self {
        AssemblySettings {
            input_path: input.into(),
            ..Default::default()
        }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_cut(mut self, cut: u32) -> Self {
        self.cut = cut;
        self
    }

    pub fn validate(&self) -> Result<(), AssemblyError> {
        if self.input_path.as_os_str().is_empty() {
            return Err(AssemblyError::MissingInput);
        }
        validate_k(self.k).map_err(|_| AssemblyError::BadK(self.k))?;
        if self.max_tip_len == Some(0) {
            return Err(AssemblyError::BadParam {
                name: "maxTipLen",
                reason: "must be at least 1".into(),
            });
        }
        Ok(())
    }

    pub fn max_tip_len(&self) -> usize {
        self.max_tip_len.unwrap_or(2 * self.k)
    }
}

/// Reads produced by the scan, after splitting on `N`.
#[derive(Debug, Clone, Default)]
pub struct ReadSet {
    pub reads: Vec<Read>,
    /// Fragments dropped for being shorter than k.
    pub dropped_fragments: usize,
}

impl ReadSet {
    pub fn total_bases(&self) -> usize {
        self.reads.iter().map(|r| r.seq.len()).sum()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TipSet(pub BTreeSet<Kmer>);

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ContigSet(pub Vec<Contig>);

impl ContigSet {
    pub fn total_bases(&self) -> usize {
        self.0.iter().map(Contig::size).sum()
    }

    pub fn largest(&self) -> usize {
        self.0.iter().map(Contig::size).max().unwrap_or(0)
    }

    /// Length of the smallest contig among the largest ones that together
    /// cover half of all contig bases.
    pub fn n50(&self) -> usize {
        let mut sizes: Vec<usize> = self.0.iter().map(Contig::size).collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        let half = self.total_bases().div_ceil(2);
        let mut acc = 0;
        for s in sizes {
            acc += s;
            if acc >= half {
                return s;
            }
        }
        0
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RepeatSet(pub Vec<RepeatHit>);

impl Datum for AssemblySettings {
    fn kind(&self) -> &'static str {
        "settings"
    }

    fn summary(&self) -> serde_json::Value {
        json!(self)
    }
}

impl Datum for ReadSet {
    fn kind(&self) -> &'static str {
        "reads"
    }

    fn summary(&self) -> serde_json::Value {
        json!({
            "count": self.reads.len(),
            "totalBases": self.total_bases(),
            "droppedFragments": self.dropped_fragments,
        })
    }
}

impl Datum for DeBruijnGraph {
    fn kind(&self) -> &'static str {
        "graph"
    }

    fn summary(&self) -> serde_json::Value {
        let stats = self.stats();
        json!({
            "k": self.k(),
            "nodes": self.node_count(),
            "edges": self.edge_count(),
            "skippedReads": stats.skipped_reads,
            "kmersIngested": stats.kmers_ingested,
        })
    }
}

impl Datum for TipSet {
    fn kind(&self) -> &'static str {
        "tips"
    }

    fn summary(&self) -> serde_json::Value {
        json!({ "count": self.0.len() })
    }
}

impl Datum for CoverageStats {
    fn kind(&self) -> &'static str {
        "coverage"
    }

    fn summary(&self) -> serde_json::Value {
        json!({
            "mean": self.mean,
            "nodes": self.nodes,
            "distinctValues": self.histogram.len(),
        })
    }
}

impl Datum for ContigSet {
    fn kind(&self) -> &'static str {
        "contigs"
    }

    fn summary(&self) -> serde_json::Value {
        json!({
            "count": self.0.len(),
            "totalBases": self.total_bases(),
            "largest": self.largest(),
            "n50": self.n50(),
        })
    }
}

impl Datum for RepeatSet {
    fn kind(&self) -> &'static str {
        "repeats"
    }

    fn summary(&self) -> serde_json::Value {
        json!({ "count": self.0.len() })
    }
}

/// All assembler phases, by name.
pub fn phase_registry() -> PhaseRegistry {
    let mut r = PhaseRegistry::new();
    r.register(ScanReadsPhase)
        .register(BuildGraphPhase)
        .register(FindTipsPhase)
        .register(ComputeCoveragePhase)
        .register(FindPathsPhase)
        .register(FindRepeatsPhase);
    r
}

pub fn default_settings() -> Settings {
    Settings::parse(DEFAULT_SETTINGS_XML).expect("built-in settings parse")
}

/// A fresh data object holding only `settings`.
pub fn init_data(settings: AssemblySettings) -> Result<DataObject, AssemblyError> {
    settings.validate()?;
    let mut d = DataObject::new();
    d.put(keys::SETTINGS, settings).expect("empty data object");
    d.record(PhaseReport::seeded(INIT_DATA, vec![keys::SETTINGS.to_string()]));
    Ok(d)
}
