//! Naive reference implementations used as test oracles.
//!
//! Everything here works on plain `String`s: no bit packing, no shared code
//! with `miniasm-core`. The functions are deliberately slow and literal so
//! that they can be trusted as independent checks.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;

pub const BASES: [u8; 4] = *b"ACGT";

pub fn random_dna<R: Rng>(rng: &mut R, len: usize) -> String {
    (0..len)
        .map(|_| BASES[rng.gen_range(0..4)] as char)
        .collect()
}

pub fn complement(b: char) -> char {
    match b {
        'A' => 'T',
        'C' => 'G',
        'G' => 'C',
        'T' => 'A',
        other => panic!("not a base: {other}"),
    }
}

pub fn revcomp(s: &str) -> String {
    s.chars().rev().map(complement).collect()
}

pub fn canonical(s: &str) -> String {
    let rc = revcomp(s);
    if rc.as_str() < s {
        rc
    } else {
        s.to_string()
    }
}

/// Every window of length `k`, left to right.
pub fn naive_kmers(s: &str, k: usize) -> Vec<String> {
    if s.len() < k {
        return Vec::new();
    }
    (0..=s.len() - k).map(|i| s[i..i + k].to_string()).collect()
}

/// All substrings of length `len` starting at every offset of `genome`.
pub fn tiling_reads(genome: &str, len: usize) -> Vec<String> {
    naive_kmers(genome, len)
}

/// True when no canonical k-mer occurs twice in `genome`.
pub fn has_distinct_canonical_kmers(genome: &str, k: usize) -> bool {
    let mut seen = BTreeSet::new();
    naive_kmers(genome, k)
        .iter()
        .all(|w| seen.insert(canonical(w)))
}

/// An oriented node: canonical k-mer string plus `true` for forward.
pub type ONode = (String, bool);

pub fn oriented_seq(node: &ONode) -> String {
    if node.1 {
        node.0.clone()
    } else {
        revcomp(&node.0)
    }
}

fn orient(kmer: &str) -> ONode {
    let c = canonical(kmer);
    let fwd = c == kmer;
    (c, fwd)
}

fn flip(node: &ONode) -> ONode {
    (node.0.clone(), !node.1)
}

/// String-set de Bruijn graph with canonical nodes and oriented edges.
#[derive(Debug, Clone, Default)]
pub struct NaiveGraph {
    pub k: usize,
    pub nodes: BTreeMap<String, u32>,
    /// (from, from_forward, to, to_forward), closed under the rc mirror.
    pub edges: BTreeSet<(String, bool, String, bool)>,
    pub skipped_reads: usize,
}

impl NaiveGraph {
    pub fn build<S: AsRef<str>>(reads: &[S], k: usize) -> Self {
        let mut g = NaiveGraph {
            k,
            ..Default::default()
        };
        for read in reads {
            let read = read.as_ref();
            if read.len() < k {
                g.skipped_reads += 1;
                continue;
            }
            let windows = naive_kmers(read, k);
            for w in &windows {
                *g.nodes.entry(canonical(w)).or_insert(0) += 1;
            }
            for pair in windows.windows(2) {
                let (a, b) = (orient(&pair[0]), orient(&pair[1]));
                // the overlap holds by construction; assert it anyway
                assert_eq!(
                    oriented_seq(&a)[1..],
                    oriented_seq(&b)[..k - 1],
                    "consecutive windows must overlap by k-1"
                );
                let mirror = (flip(&b), flip(&a));
                g.edges.insert((a.0, a.1, b.0, b.1));
                g.edges.insert((mirror.0 .0, mirror.0 .1, mirror.1 .0, mirror.1 .1));
            }
        }
        g
    }

    /// Count of undirected adjacencies (an edge and its mirror count once).
    pub fn adjacency_count(&self) -> usize {
        let mut seen = BTreeSet::new();
        for (a, oa, b, ob) in &self.edges {
            let e = (a.clone(), *oa, b.clone(), *ob);
            let m = (b.clone(), !*ob, a.clone(), !*oa);
            seen.insert(std::cmp::min(e, m));
        }
        seen.len()
    }

    fn successors(&self, node: &ONode, keep: &BTreeSet<String>) -> Vec<ONode> {
        self.edges
            .iter()
            .filter(|(a, oa, b, _)| a == &node.0 && *oa == node.1 && keep.contains(b))
            .map(|(_, _, b, ob)| (b.clone(), *ob))
            .collect()
    }

    fn predecessors(&self, node: &ONode, keep: &BTreeSet<String>) -> Vec<ONode> {
        self.edges
            .iter()
            .filter(|(a, _, b, ob)| b == &node.0 && *ob == node.1 && keep.contains(a))
            .map(|(a, oa, _, _)| (a.clone(), *oa))
            .collect()
    }

    /// (in, out) degree of an oriented node in the full graph.
    pub fn degrees(&self, node: &ONode) -> (usize, usize) {
        let all: BTreeSet<String> = self.nodes.keys().cloned().collect();
        (
            self.predecessors(node, &all).len(),
            self.successors(node, &all).len(),
        )
    }

    /// Maximal non-branching paths over nodes with coverage >= `cut` that
    /// are not in `tips`. Nodes are seeded in sorted canonical order; each
    /// seed is extended forward, then backward; a path never revisits a
    /// node; each path is reported in the orientation whose spelling is
    /// lexicographically smaller.
    pub fn extract_paths(&self, cut: u32, tips: &BTreeSet<String>) -> Vec<Vec<ONode>> {
        let keep: BTreeSet<String> = self
            .nodes
            .iter()
            .filter(|(n, c)| **c >= cut && !tips.contains(*n))
            .map(|(n, _)| n.clone())
            .collect();
        let mut visited = BTreeSet::new();
        let mut paths = Vec::new();
        for seed in &keep {
            if visited.contains(seed) {
                continue;
            }
            let mut in_path = BTreeSet::new();
            in_path.insert(seed.clone());
            let right = self.walk((seed.clone(), true), &keep, &mut in_path);
            let left = self.walk((seed.clone(), false), &keep, &mut in_path);
            let mut path: Vec<ONode> = left.iter().rev().map(flip).collect();
            path.push((seed.clone(), true));
            path.extend(right);
            for n in &path {
                visited.insert(n.0.clone());
            }
            let spelled = spell(&path, self.k);
            if spelled > revcomp(&spelled) {
                path = path.iter().rev().map(flip).collect();
            }
            paths.push(path);
        }
        paths
    }

    fn walk(&self, start: ONode, keep: &BTreeSet<String>, in_path: &mut BTreeSet<String>) -> Vec<ONode> {
        let mut out = Vec::new();
        let mut cur = start;
        loop {
            let succ = self.successors(&cur, keep);
            if succ.len() != 1 {
                break;
            }
            let next = succ[0].clone();
            if self.predecessors(&next, keep).len() != 1 || in_path.contains(&next.0) {
                break;
            }
            in_path.insert(next.0.clone());
            out.push(next.clone());
            cur = next;
        }
        out
    }
}

/// Spell an oriented path: the first k-mer, then the last base of each
/// following k-mer.
pub fn spell(path: &[ONode], k: usize) -> String {
    let mut out = String::new();
    for (i, node) in path.iter().enumerate() {
        let s = oriented_seq(node);
        if i == 0 {
            out.push_str(&s);
        } else {
            out.push_str(&s[k - 1..]);
        }
    }
    out
}

fn is_primitive(m: &[u8]) -> bool {
    let p = m.len();
    (1..p)
        .filter(|d| p % d == 0)
        .all(|d| !m.chunks(d).all(|c| c == &m[..d]))
}

/// Brute force tandem repeats: try every (start, motif length, repetition
/// count) triple and keep those that are full copies of a primitive motif,
/// cannot be extended left by one base under the same period, and cannot be
/// extended right by a further full copy.
///
/// Returns `(start, span, motif)` ordered by start, then motif length.
pub fn brute_force_repeats(s: &str, min_tot_len: usize, min_motif_len: usize) -> Vec<(usize, usize, String)> {
    let b = s.as_bytes();
    let n = b.len();
    let mut hits = Vec::new();
    for start in 0..n {
        for p in min_motif_len.max(1)..=(n - start) / 2 {
            let motif = &b[start..start + p];
            for reps in 2..=(n - start) / p {
                // more copies cannot match once these do not
                if &b[start + (reps - 1) * p..start + reps * p] != motif {
                    break;
                }
                let span = reps * p;
                if span < min_tot_len || !is_primitive(motif) {
                    continue;
                }
                let left_max = start == 0 || b[start - 1] != b[start - 1 + p];
                let end = start + span;
                let right_max = end + p > n || &b[end..end + p] != motif;
                if left_max && right_max {
                    hits.push((start, span, String::from_utf8(motif.to_vec()).unwrap()));
                }
            }
        }
    }
    hits.sort_by_key(|h| (h.0, h.2.len()));
    hits
}

/// Write `(id, seq)` records as FASTA, one line per sequence.
pub fn write_fasta<S: AsRef<str>>(path: &Path, records: &[(S, S)]) -> PathBuf {
    let mut text = String::new();
    for (id, seq) in records {
        text.push_str(&format!(">{}\n{}\n", id.as_ref(), seq.as_ref()));
    }
    fs::write(path, text).expect("write fixture");
    path.to_path_buf()
}

/// Write reads as FASTA with ids `r0`, `r1`, ...
pub fn write_reads<S: AsRef<str>>(path: &Path, reads: &[S]) -> PathBuf {
    let records: Vec<(String, String)> = reads
        .iter()
        .enumerate()
        .map(|(i, r)| (format!("r{i}"), r.as_ref().to_string()))
        .collect();
    write_fasta(path, &records)
}

/// A single read that assembles into one 5-base contig at k=3.
pub const TINY_READS: [&str; 1] = ["AAACC"];
pub const TINY_K: usize = 3;

/// A random genome with distinct canonical k-mers, and reads of length
/// `read_len` starting at every offset.
pub fn unique_genome<R: Rng>(rng: &mut R, len: usize, k: usize, read_len: usize) -> (String, Vec<String>) {
    loop {
        let g = random_dna(rng, len);
        if has_distinct_canonical_kmers(&g, k) {
            let reads = tiling_reads(&g, read_len);
            return (g, reads);
        }
    }
}

/// `coverage`-fold reads of length `read_len` at uniform random positions,
/// each taken from either strand with equal probability.
pub fn sample_reads<R: Rng>(rng: &mut R, genome: &str, coverage: usize, read_len: usize) -> Vec<String> {
    let n = (genome.len() * coverage).div_ceil(read_len);
    (0..n)
        .map(|_| {
            let start = rng.gen_range(0..=genome.len() - read_len);
            let r = &genome[start..start + read_len];
            if rng.gen_bool(0.5) {
                revcomp(r)
            } else {
                r.to_string()
            }
        })
        .collect()
}
