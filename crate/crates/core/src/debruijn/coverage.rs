use std::collections::BTreeMap;

use serde::Serialize;

use super::DeBruijnGraph;

/// Node coverage distribution: coverage value -> number of nodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CoverageStats {
    pub histogram: BTreeMap<u32, u64>,
    /// Mean node coverage; 0 for an empty graph.
    pub mean: f64,
    pub empty_graph: bool,
    pub nodes: u64,
    pub total: u64,
}

pub fn coverage_histogram(g: &DeBruijnGraph) -> CoverageStats {
    let mut histogram = BTreeMap::new();
    let mut total = 0u64;
    let mut nodes = 0u64;
    for (_, c) in g.nodes() {
        *histogram.entry(c).or_insert(0u64) += 1;
        total += c as u64;
        nodes += 1;
    }
    CoverageStats {
        histogram,
        mean: if nodes == 0 { 0.0 } else { total as f64 / nodes as f64 },
        empty_graph: nodes == 0,
        nodes,
        total,
    }
}
