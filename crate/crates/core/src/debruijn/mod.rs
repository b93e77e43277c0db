//! Canonical k-mer de Bruijn graph: construction, coverage, tips and
//! unambiguous path extraction.

mod coverage;
mod graph;
mod paths;
mod tips;

use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

pub use coverage::{coverage_histogram, CoverageStats};
pub use graph::{build_graph, BuildStats, DeBruijnGraph, Edge, GraphBuilder};
pub use paths::{extract_paths, spell, Path};
pub use tips::find_tips;

use crate::seq::{Kmer, SeqError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error("UnknownNode: {0}")]
    UnknownNode(Kmer),
    #[error("BadParam {name}: {reason}")]
    BadParam { name: &'static str, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Orientation {
    Forward,
    Reverse,
}

impl Orientation {
    pub fn flip(self) -> Self {
        match self {
            Orientation::Forward => Orientation::Reverse,
            Orientation::Reverse => Orientation::Forward,
        }
    }
}

/// A canonical node read in one orientation.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeRef {
    pub node: Kmer,
    pub orientation: Orientation,
}

impl NodeRef {
    pub fn new(node: Kmer, orientation: Orientation) -> Self {
        NodeRef { node, orientation }
    }

    /// The node and orientation under which `kmer` is read.
    #[inline]
    pub fn from_oriented(kmer: Kmer) -> Self {
        let c = kmer.canonical();
        let orientation = if c == kmer {
            Orientation::Forward
        } else {
            Orientation::Reverse
        };
        NodeRef { node: c, orientation }
    }

    /// The k-mer as read in this orientation.
    #[inline]
    pub fn oriented(&self) -> Kmer {
        match self.orientation {
            Orientation::Forward => self.node,
            Orientation::Reverse => self.node.reverse_complement(),
        }
    }

    pub fn flip(&self) -> Self {
        NodeRef {
            node: self.node,
            orientation: self.orientation.flip(),
        }
    }
}

impl fmt::Debug for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.orientation {
            Orientation::Forward => '+',
            Orientation::Reverse => '-',
        };
        write!(f, "{}{}", self.node, sign)
    }
}

impl Serialize for NodeRef {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&format_args!("{:?}", self))
    }
}
