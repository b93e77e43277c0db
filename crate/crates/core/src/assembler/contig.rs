use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use super::repeats::{find_repeats, Repeat};
use super::AssemblyError;
use crate::seq::{write_fasta_record, PackedSeq};

/// Bases shown when a contig is printed.
pub const RENDER_PREFIX: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct Contig {
    pub id: usize,
    pub seq: PackedSeq,
    /// Mean coverage of the nodes on the contig's path.
    pub avg_coverage: f64,
}

impl Contig {
    pub fn size(&self) -> usize {
        self.seq.len()
    }

    pub fn repeats(&self, min_tot_len: usize, min_motif_len: usize) -> Result<Vec<RepeatHit>, AssemblyError> {
        let hits = find_repeats(self.seq.to_ascii().as_slice(), min_tot_len, min_motif_len)?;
        Ok(hits.into_iter().map(|r| RepeatHit::new(self.id, r)).collect())
    }

    /// FASTA header, without the leading `>`.
    pub fn header(&self) -> String {
        format!("contig_{} length={} cov={:.2}", self.id, self.size(), self.avg_coverage)
    }
}

impl fmt::Display for Contig {
    /// First 60 bases, then `...` if the contig is longer.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.size() <= RENDER_PREFIX {
            write!(f, "{}", self.seq)
        } else {
            write!(f, "{}...", self.seq.slice(0, RENDER_PREFIX))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RepeatHit {
    pub contig_id: usize,
    pub start: usize,
    pub span_length: usize,
    pub motif: String,
    pub display_pattern: String,
}

impl RepeatHit {
    pub fn new(contig_id: usize, r: Repeat) -> Self {
        RepeatHit {
            contig_id,
            start: r.start,
            span_length: r.span_length,
            display_pattern: r.display_pattern(),
            motif: r.motif,
        }
    }
}

/// Write one FASTA record per contig in the given order.
pub fn write_contigs<W: Write>(w: &mut W, contigs: &[Contig]) -> io::Result<()> {
    for c in contigs {
        write_fasta_record(w, &c.header(), &c.seq.to_ascii())?;
    }
    Ok(())
}

pub fn write_contig_file(contigs: &[Contig], path: impl AsRef<Path>) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_contigs(&mut w, contigs)?;
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn contig(id: usize, s: &str, cov: f64) -> Contig {
        Contig {
            id,
            seq: s.parse().unwrap(),
            avg_coverage: cov,
        }
    }

    fn render(contigs: &[Contig]) -> String {
        let mut out = Vec::new();
        write_contigs(&mut out, contigs).unwrap();
        String::from_utf8(out).unwrap()
    }

    #[test]
    fn single_record() {
        assert_eq!(render(&[contig(0, "AAACC", 1.0)]), ">contig_0 length=5 cov=1.00\nAAACC\n");
    }

    #[test]
    fn empty_set_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.fa");
        write_contig_file(&[], &path).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"");
    }

    #[test]
    fn unwritable_path() {
        let dir = tempfile::tempdir().unwrap();
        assert!(write_contig_file(&[], dir.path().join("no/such/dir/c.fa")).is_err());
    }

    #[test]
    fn wraps_and_rounds() {
        let s = "ACGT".repeat(41);
        let text = render(&[contig(3, &s, 2.0 / 3.0)]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], ">contig_3 length=164 cov=0.67");
        assert_eq!(lines[1].len(), 80);
        assert_eq!(lines[2].len(), 80);
        assert_eq!(lines[3].len(), 4);
    }

    #[test]
    fn display_truncates() {
        assert_eq!(contig(0, "ACGT", 1.0).to_string(), "ACGT");
        let long = contig(0, &"A".repeat(61), 1.0).to_string();
        assert_eq!(long, format!("{}...", "A".repeat(60)));
    }

    #[test]
    fn hits_carry_contig_id() {
        let hits = contig(7, "ACGACGACG", 1.0).repeats(8, 3).unwrap();
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].contig_id, 7);
        assert_eq!(hits[0].display_pattern, "ACGACGACG");
    }
}
