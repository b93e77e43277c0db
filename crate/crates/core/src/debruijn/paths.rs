use std::collections::BTreeSet;

use rustc_hash::FxHashSet;
use serde::Serialize;

use super::{DeBruijnGraph, NodeRef, Orientation};
use crate::seq::{Kmer, PackedSeq};

/// Consecutive oriented nodes, each linked to the next by an edge. No
/// node occurs twice.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Path {
    pub nodes: Vec<NodeRef>,
}

impl Path {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The same path read on the other strand.
    pub fn reversed(&self) -> Path {
        Path {
            nodes: self.nodes.iter().rev().map(NodeRef::flip).collect(),
        }
    }
}

/// The sequence of a path: its first k-mer followed by the last base of
/// every later k-mer, `len + k - 1` bases in all.
pub fn spell(path: &Path, k: usize) -> PackedSeq {
    let mut out = PackedSeq::with_capacity(path.len() + k - 1);
    if let Some(first) = path.nodes.first() {
        let km = first.oriented();
        for i in 0..k {
            out.push(km.base(i));
        }
    }
    for n in path.nodes.iter().skip(1) {
        out.push(n.oriented().last_base());
    }
    out
}

struct Subgraph<'a> {
    g: &'a DeBruijnGraph,
    cut: u32,
    tips: &'a BTreeSet<Kmer>,
}

impl Subgraph<'_> {
    #[inline]
    fn keeps(&self, n: &Kmer) -> bool {
        self.g.coverage(n).is_some_and(|c| c >= self.cut) && !self.tips.contains(n)
    }

    fn unique_successor(&self, n: NodeRef) -> Option<NodeRef> {
        let mut it = self.g.successors(n).filter(|s| self.keeps(&s.node));
        let first = it.next()?;
        it.next().is_none().then_some(first)
    }

    fn in_degree_is_one(&self, n: NodeRef) -> bool {
        self.g.predecessors(n).filter(|p| self.keeps(&p.node)).take(2).count() == 1
    }

    /// Extend from `start` while the path stays unambiguous, without
    /// revisiting any node already in `in_path`.
    fn walk(&self, start: NodeRef, in_path: &mut FxHashSet<u128>) -> Vec<NodeRef> {
        let mut out = Vec::new();
        let mut cur = start;
        while let Some(next) = self.unique_successor(cur) {
            if !self.in_degree_is_one(next) || !in_path.insert(next.node.word()) {
                break;
            }
            out.push(next);
            cur = next;
        }
        out
    }
}

/// Maximal unambiguous paths of the subgraph that excludes nodes with
/// coverage below `cut` and nodes in `tips`.
///
/// Every surviving node lies on exactly one path. Seeds are taken in
/// ascending canonical order and extended forward, then backward, so an
/// isolated cycle is broken at its smallest k-mer. Each path is returned
/// in the orientation whose spelling is lexicographically smaller than
/// its reverse complement.
pub fn extract_paths(g: &DeBruijnGraph, cut: u32, tips: &BTreeSet<Kmer>) -> Vec<Path> {
    let sub = Subgraph { g, cut, tips };
    let mut visited: FxHashSet<u128> = FxHashSet::default();
    let mut paths = Vec::new();
    for seed in g.sorted_nodes() {
        if !sub.keeps(&seed) || visited.contains(&seed.word()) {
            continue;
        }
        let mut in_path = FxHashSet::default();
        in_path.insert(seed.word());
        let right = sub.walk(NodeRef::new(seed, Orientation::Forward), &mut in_path);
        let left = sub.walk(NodeRef::new(seed, Orientation::Reverse), &mut in_path);

        let mut nodes: Vec<NodeRef> = left.iter().rev().map(NodeRef::flip).collect();
        nodes.push(NodeRef::new(seed, Orientation::Forward));
        nodes.extend(right);
        visited.extend(in_path);

        let path = Path { nodes };
        let seq = spell(&path, g.k());
        if seq > seq.reverse_complement() {
            paths.push(path.reversed());
        } else {
            paths.push(path);
        }
    }
    paths
}
