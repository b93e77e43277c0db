//! Phase pipeline engine with an append-only shared data model, and a
//! small de Bruijn graph genome assembler built on top of it.
//!
//! * [`seq`]: packed DNA, k-mers, FASTA/FASTQ.
//! * [`pipeline`]: data objects, phase tree, phases, settings, runner.
//! * [`debruijn`]: graph construction and analysis.
//! * [`assembler`]: the concrete assembly phases, repeats and contig output.

pub mod assembler;
pub mod debruijn;
pub mod pipeline;
pub mod seq;

pub use pipeline::{DataObject, Phase, PhaseRegistry, PhaseReport, PipelineSpec, Settings, SnapshotId, SnapshotStore};
pub use seq::{Kmer, PackedSeq, Read};
