//! DNA alphabet, 2-bit packed sequences and k-mers, FASTA/FASTQ ingestion.

mod fastx;
mod kmer;
mod packed;

pub use fastx::{read_sequences, write_fasta_record, Format, Read, SeqRecord, SequenceReader, FASTA_LINE_WIDTH};
pub use kmer::{kmers, validate_k, Kmer, Kmers, MAX_K};
pub use packed::{base_to_code, code_to_base, PackedSeq};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeqError {
    #[error("invalid base {ch:?} at position {position}")]
    InvalidBase { position: usize, ch: char },
    #[error("k must be odd and between 3 and 63, got {0}")]
    BadK(usize),
    #[error("unknown sequence format: expected '>' (FASTA) or '@' (FASTQ)")]
    UnknownFormat,
    #[error("malformed record at line {line}")]
    MalformedRecord { line: usize },
    #[error("read {id}: quality length {qual} differs from sequence length {seq}")]
    QualityLength { id: String, seq: usize, qual: usize },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for SeqError {
    fn from(e: std::io::Error) -> Self {
        SeqError::Io(e.to_string())
    }
}
