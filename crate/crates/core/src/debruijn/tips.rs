use std::collections::{BTreeMap, BTreeSet};

use super::{DeBruijnGraph, GraphError, NodeRef, Orientation};
use crate::seq::Kmer;

struct Branch {
    len: usize,
    // last chain node, next to the junction
    attach: NodeRef,
    nodes: Vec<Kmer>,
}

/// Nodes on short dead-end chains hanging off a junction.
///
/// Starting at every dead end (an oriented node without predecessors), the
/// walk follows the unique successor while the next node has exactly one
/// predecessor. The chain is a candidate tip if it reaches a node with
/// several predecessors (the junction) within `max_tip_len` nodes. Chains
/// that end at another dead end or fan out are not tips, so an isolated
/// linear component is never trimmed.
///
/// When every branch entering a junction is a candidate, the longest one
/// (ties: smallest attaching node) is kept as the backbone and the others
/// are tips. Otherwise all candidates at that junction are tips.
pub fn find_tips(g: &DeBruijnGraph, max_tip_len: usize) -> Result<BTreeSet<Kmer>, GraphError> {
    if max_tip_len == 0 {
        return Err(GraphError::BadParam {
            name: "maxTipLen",
            reason: "must be at least 1".into(),
        });
    }
    let mut at_junction: BTreeMap<NodeRef, Vec<Branch>> = BTreeMap::new();
    for n in g.sorted_nodes() {
        for o in [Orientation::Forward, Orientation::Reverse] {
            let start = NodeRef::new(n, o);
            if g.predecessors(start).next().is_some() {
                continue;
            }
            if let Some((junction, branch)) = walk_from_dead_end(g, start, max_tip_len) {
                at_junction.entry(junction).or_default().push(branch);
            }
        }
    }

    let mut tips = BTreeSet::new();
    for (junction, mut branches) in at_junction {
        let in_degree = g.predecessors(junction).count();
        if branches.len() >= in_degree {
            branches.sort_by(|a, b| b.len.cmp(&a.len).then(a.attach.cmp(&b.attach)));
            branches.remove(0);
        }
        for b in branches {
            tips.extend(b.nodes);
        }
    }
    Ok(tips)
}

fn walk_from_dead_end(g: &DeBruijnGraph, start: NodeRef, max_len: usize) -> Option<(NodeRef, Branch)> {
    let mut nodes = vec![start.node];
    let mut cur = start;
    loop {
        let mut succ = g.successors(cur);
        let next = succ.next()?;
        if succ.next().is_some() {
            return None;
        }
        if g.predecessors(next).nth(1).is_some() {
            let branch = Branch {
                len: nodes.len(),
                attach: cur,
                nodes,
            };
            return Some((next, branch));
        }
        if nodes.len() >= max_len || nodes.contains(&next.node) {
            return None;
        }
        nodes.push(next.node);
        cur = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::debruijn::build_graph;
    use crate::seq::PackedSeq;

    fn graph(reads: &[&str], k: usize) -> DeBruijnGraph {
        let seqs: Vec<PackedSeq> = reads.iter().map(|r| r.parse().unwrap()).collect();
        build_graph(&seqs, k).unwrap()
    }

    fn names(s: &BTreeSet<Kmer>) -> Vec<String> {
        s.iter().map(|k| k.to_string()).collect()
    }

    #[test]
    fn dangling_acg() {
        let g = graph(&["AAACCC", "AACG"], 3);
        assert_eq!(names(&find_tips(&g, 6).unwrap()), vec!["ACG"]);
    }

    #[test]
    fn pure_chain_has_no_tips() {
        let g = graph(&["AAACCTG"], 3);
        assert!(find_tips(&g, 6).unwrap().is_empty());
    }

    #[test]
    fn zero_length_rejected() {
        let g = graph(&["AAACCC", "AACG"], 3);
        assert!(matches!(find_tips(&g, 0), Err(GraphError::BadParam { .. })));
    }

    #[test]
    fn long_dangle_is_kept() {
        // both branches off GATCC are short dead ends: the 5-node one is
        // kept, the 2-node one is a tip
        let g = graph(&["GATCCATTAG", "GATCCGC"], 5);
        let tips = find_tips(&g, 10).unwrap();
        assert_eq!(names(&tips).len(), 2);
        assert!(find_tips(&g, 1).unwrap().is_empty());
    }

    #[test]
    fn dangle_off_long_backbone() {
        // backbone longer than max_tip_len on both sides of the junction
        let backbone = "CCGTAATGCCTTTCCCTAACA";
        let spur = format!("{}A", &backbone[..10]);
        let g = graph(&[backbone, &spur], 5);
        let tips = find_tips(&g, 3).unwrap();
        assert_eq!(names(&tips), vec!["TGCCA"]);
    }
}
