use std::sync::OnceLock;

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::Serialize;

use super::{GraphError, NodeRef, Orientation};
use crate::seq::{validate_k, Kmer, PackedSeq};

const SHARD_BITS: u32 = 6;
const SHARDS: usize = 1 << SHARD_BITS;
const BATCH_READS: usize = 1 << 15;

// Adjacency bits, stored in the node's forward frame:
//   bit b      (0..4): successor obtained by appending base b
//   bit 4 + b  (4..8): predecessor obtained by prepending base b
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct NodeData {
    coverage: u32,
    edges: u8,
}

#[inline]
fn shard_of(word: u128) -> usize {
    let folded = (word as u64) ^ ((word >> 64) as u64);
    (folded.wrapping_mul(0x9E37_79B9_7F4A_7C15) >> (64 - SHARD_BITS)) as usize
}

/// Map bit b to bit 3 - b within a nibble (complementing the base).
#[inline]
fn complement_nibble(n: u8) -> u8 {
    ((n & 1) << 3) | ((n & 2) << 1) | ((n & 4) >> 1) | ((n & 8) >> 3)
}

#[inline]
fn out_bits(edges: u8, o: Orientation) -> u8 {
    match o {
        Orientation::Forward => edges & 0xF,
        Orientation::Reverse => complement_nibble(edges >> 4),
    }
}

#[inline]
fn in_bits(edges: u8, o: Orientation) -> u8 {
    match o {
        Orientation::Forward => edges >> 4,
        Orientation::Reverse => complement_nibble(edges & 0xF),
    }
}

/// One oriented edge: `from` read in `from_orientation` is followed by `to`
/// read in `to_orientation`, overlapping by k - 1 bases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Edge {
    pub from: NodeRef,
    pub to: NodeRef,
}

impl Edge {
    /// The same adjacency seen from the opposite strand.
    pub fn mirror(&self) -> Edge {
        Edge {
            from: self.to.flip(),
            to: self.from.flip(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BuildStats {
    pub reads: usize,
    pub skipped_reads: usize,
    pub kmers_ingested: u64,
}

/// Canonical k-mer de Bruijn graph with per-node coverage and oriented
/// edges. Immutable once built.
#[derive(Debug, Clone)]
pub struct DeBruijnGraph {
    k: u8,
    shards: Vec<FxHashMap<u128, NodeData>>,
    stats: BuildStats,
    edge_count: OnceLock<usize>,
}

/// Accumulates reads into a graph. Reads are processed in batches; within
/// a batch k-mers are extracted in parallel and merged per shard by count
/// addition and bit union, so the result does not depend on read order.
pub struct GraphBuilder {
    k: u8,
    shards: Vec<FxHashMap<u128, NodeData>>,
    stats: BuildStats,
    batch: Vec<PackedSeq>,
}

impl GraphBuilder {
    pub fn new(k: usize) -> Result<Self, GraphError> {
        let k = validate_k(k)? as u8;
        Ok(GraphBuilder {
            k,
            shards: vec![FxHashMap::default(); SHARDS],
            stats: BuildStats::default(),
            batch: Vec::new(),
        })
    }

    pub fn add(&mut self, seq: &PackedSeq) {
        self.stats.reads += 1;
        if seq.len() < self.k as usize {
            self.stats.skipped_reads += 1;
            return;
        }
        self.batch.push(seq.clone());
        if self.batch.len() >= BATCH_READS {
            self.flush();
        }
    }

    fn flush(&mut self) {
        if self.batch.is_empty() {
            return;
        }
        let k = self.k;
        let chunk = (self.batch.len() / rayon::current_num_threads().max(1)).max(256);
        let buckets: Vec<Vec<Vec<(u128, u8)>>> = self
            .batch
            .par_chunks(chunk)
            .map(|reads| {
                let mut b = vec![Vec::new(); SHARDS];
                for r in reads {
                    read_updates(r, k, |word, bits| b[shard_of(word)].push((word, bits)));
                }
                b
            })
            .collect();
        self.stats.kmers_ingested += buckets.iter().flatten().map(|v| v.len() as u64).sum::<u64>();
        self.shards.par_iter_mut().enumerate().for_each(|(s, map)| {
            for chunk in &buckets {
                for &(word, bits) in &chunk[s] {
                    let node = map.entry(word).or_default();
                    node.coverage = node.coverage.saturating_add(1);
                    node.edges |= bits;
                }
            }
        });
        self.batch.clear();
    }

    pub fn finish(mut self) -> DeBruijnGraph {
        self.flush();
        DeBruijnGraph {
            k: self.k,
            shards: self.shards,
            stats: self.stats,
            edge_count: OnceLock::new(),
        }
    }
}

/// Emit (canonical word, forward-frame edge bits) for every k-mer of `seq`,
/// maintaining forward and reverse-complement words incrementally.
#[inline]
fn read_updates(seq: &PackedSeq, k: u8, mut emit: impl FnMut(u128, u8)) {
    let n = seq.len();
    let k = k as usize;
    let mask = (1u128 << (2 * k)) - 1;
    let top = 2 * (k - 1);
    let (mut fwd, mut rev) = (0u128, 0u128);
    for i in 0..k {
        let c = seq.get(i) as u128;
        fwd = (fwd << 2) | c;
        rev = (rev >> 2) | ((3 - c) << top);
    }
    for start in 0..=n - k {
        if start > 0 {
            let c = seq.get(start + k - 1) as u128;
            fwd = ((fwd << 2) | c) & mask;
            rev = (rev >> 2) | ((3 - c) << top);
        }
        let forward = fwd <= rev;
        let mut bits = 0u8;
        if start + k < n {
            // successor appends the next base
            let b = seq.get(start + k);
            bits |= if forward { 1 << b } else { 1 << (4 + 3 - b) };
        }
        if start > 0 {
            // predecessor prepends the previous base
            let b = seq.get(start - 1);
            bits |= if forward { 1 << (4 + b) } else { 1 << (3 - b) };
        }
        emit(if forward { fwd } else { rev }, bits);
    }
}

/// Build the graph of all canonical k-mers in `seqs`. Sequences shorter
/// than `k` are skipped and counted.
pub fn build_graph<'a, I>(seqs: I, k: usize) -> Result<DeBruijnGraph, GraphError>
where
    I: IntoIterator<Item = &'a PackedSeq>,
{
    let mut b = GraphBuilder::new(k)?;
    for s in seqs {
        b.add(s);
    }
    Ok(b.finish())
}

impl DeBruijnGraph {
    pub fn k(&self) -> usize {
        self.k as usize
    }

    pub fn stats(&self) -> BuildStats {
        self.stats
    }

    pub fn node_count(&self) -> usize {
        self.shards.iter().map(|s| s.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.node_count() == 0
    }

    fn data(&self, word: u128) -> Option<&NodeData> {
        self.shards[shard_of(word)].get(&word)
    }

    pub fn contains(&self, node: &Kmer) -> bool {
        node.k() == self.k() && node.is_canonical() && self.data(node.word()).is_some()
    }

    /// Coverage of a k-mer in either orientation.
    pub fn coverage(&self, kmer: &Kmer) -> Option<u32> {
        if kmer.k() != self.k() {
            return None;
        }
        self.data(kmer.canonical().word()).map(|d| d.coverage)
    }

    /// Nodes whose coverage counter hit `u32::MAX`.
    pub fn saturated_nodes(&self) -> usize {
        self.shards
            .iter()
            .flat_map(|s| s.values())
            .filter(|d| d.coverage == u32::MAX)
            .count()
    }

    /// Canonical nodes in ascending order.
    pub fn sorted_nodes(&self) -> Vec<Kmer> {
        let mut words: Vec<u128> = self.shards.iter().flat_map(|s| s.keys().copied()).collect();
        words.par_sort_unstable();
        words.into_iter().map(|w| Kmer::from_word_unchecked(w, self.k)).collect()
    }

    /// (node, coverage) pairs in ascending node order.
    pub fn nodes(&self) -> Vec<(Kmer, u32)> {
        self.sorted_nodes()
            .into_iter()
            .map(|n| (n, self.data(n.word()).map_or(0, |d| d.coverage)))
            .collect()
    }

    pub fn total_coverage(&self) -> u64 {
        self.shards
            .iter()
            .flat_map(|s| s.values())
            .map(|d| d.coverage as u64)
            .sum()
    }

    fn edges_of(&self, node: &NodeRef) -> Result<u8, GraphError> {
        self.data(node.node.word())
            .filter(|_| node.node.k() == self.k())
            .map(|d| d.edges)
            .ok_or(GraphError::UnknownNode(node.node))
    }

    /// Oriented successors: each overlaps `node` by k - 1 bases.
    pub fn successors(&self, node: NodeRef) -> impl Iterator<Item = NodeRef> {
        let bits = self.edges_of(&node).map_or(0, |e| out_bits(e, node.orientation));
        let seq = node.oriented();
        (0..4u8)
            .filter(move |b| bits & (1 << b) != 0)
            .map(move |b| NodeRef::from_oriented(seq.extend_right(b)))
    }

    pub fn predecessors(&self, node: NodeRef) -> impl Iterator<Item = NodeRef> {
        let bits = self.edges_of(&node).map_or(0, |e| in_bits(e, node.orientation));
        let seq = node.oriented();
        (0..4u8)
            .filter(move |b| bits & (1 << b) != 0)
            .map(move |b| NodeRef::from_oriented(seq.extend_left(b)))
    }

    /// (in-degree, out-degree) of a node read in `orientation`.
    pub fn degrees(&self, node: &Kmer, orientation: Orientation) -> Result<(usize, usize), GraphError> {
        let r = NodeRef::new(node.canonical(), orientation);
        if !self.contains(&r.node) || r.node != *node {
            return Err(GraphError::UnknownNode(*node));
        }
        let e = self.edges_of(&r)?;
        Ok((
            in_bits(e, orientation).count_ones() as usize,
            out_bits(e, orientation).count_ones() as usize,
        ))
    }

    /// Every oriented edge, mirrors included, in ascending order.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        for n in self.sorted_nodes() {
            for o in [Orientation::Forward, Orientation::Reverse] {
                let from = NodeRef::new(n, o);
                out.extend(self.successors(from).map(|to| Edge { from, to }));
            }
        }
        out.sort_unstable();
        out
    }

    /// Number of oriented edges including mirrors.
    pub fn directed_edge_count(&self) -> usize {
        self.shards
            .iter()
            .flat_map(|s| s.values())
            .map(|d| d.edges.count_ones() as usize)
            .sum()
    }

    /// Number of distinct adjacencies: an edge and its mirror count once.
    pub fn edge_count(&self) -> usize {
        *self.edge_count.get_or_init(|| self.count_adjacencies())
    }

    fn count_adjacencies(&self) -> usize {
        let mut self_mirrored = 0;
        for shard in &self.shards {
            for &w in shard.keys() {
                let n = Kmer::from_word_unchecked(w, self.k);
                for o in [Orientation::Forward, Orientation::Reverse] {
                    let from = NodeRef::new(n, o);
                    self_mirrored += self.successors(from).filter(|to| *to == from.flip()).count();
                }
            }
        }
        (self.directed_edge_count() + self_mirrored) / 2
    }
}
