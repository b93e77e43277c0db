//! Streaming FASTA/FASTQ input and FASTA output.

use std::fmt;
use std::io::{BufRead, Write};

use serde::Serialize;

use super::packed::PackedSeq;
use super::SeqError;

pub const FASTA_LINE_WIDTH: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Format {
    Fasta,
    Fastq,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Fasta => "Fasta format",
            Format::Fastq => "Fastq format",
        })
    }
}

/// A record exactly as read from the file, before base validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeqRecord {
    pub id: String,
    pub seq: Vec<u8>,
    pub qual: Option<Vec<u8>>,
}

/// An input read: identifier, packed bases and the untouched quality
/// string when the source was FASTQ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Read {
    pub id: String,
    pub seq: PackedSeq,
    pub quality: Option<String>,
}

impl Read {
    pub fn new(id: impl Into<String>, seq: PackedSeq, quality: Option<String>) -> Result<Self, SeqError> {
        let id = id.into();
        if let Some(q) = &quality {
            if q.len() != seq.len() {
                return Err(SeqError::QualityLength {
                    id,
                    seq: seq.len(),
                    qual: q.len(),
                });
            }
        }
        Ok(Read { id, seq, quality })
    }

    pub fn from_record(rec: SeqRecord) -> Result<Self, SeqError> {
        let seq = PackedSeq::encode(&rec.seq)?;
        let quality = rec.qual.map(|q| String::from_utf8_lossy(&q).into_owned());
        Read::new(rec.id, seq, quality)
    }
}

/// Lazily yields records from a FASTA or FASTQ stream. The format is
/// detected from the first non-whitespace byte.
pub struct SequenceReader<R> {
    reader: R,
    format: Format,
    line_no: usize,
    pending: Option<(String, usize)>,
    buf: String,
    done: bool,
}

/// Open a record stream, detecting its format.
pub fn read_sequences<R: BufRead>(reader: R) -> Result<SequenceReader<R>, SeqError> {
    SequenceReader::new(reader)
}

impl<R: BufRead> SequenceReader<R> {
    pub fn new(reader: R) -> Result<Self, SeqError> {
        let mut r = SequenceReader {
            reader,
            format: Format::Fasta,
            line_no: 0,
            pending: None,
            buf: String::new(),
            done: false,
        };
        match r.next_nonblank_line()? {
            Some((line, no)) => {
                r.format = match line.as_bytes()[0] {
                    b'>' => Format::Fasta,
                    b'@' => Format::Fastq,
                    _ => return Err(SeqError::UnknownFormat),
                };
                r.pending = Some((line, no));
            }
            // an empty stream has no records; call it FASTA
            None => r.done = true,
        }
        Ok(r)
    }

    pub fn format(&self) -> Format {
        self.format
    }

    fn read_line(&mut self) -> Result<Option<String>, SeqError> {
        self.buf.clear();
        if self.reader.read_line(&mut self.buf)? == 0 {
            return Ok(None);
        }
        self.line_no += 1;
        Ok(Some(self.buf.trim_end_matches(['\n', '\r']).to_string()))
    }

    fn next_nonblank_line(&mut self) -> Result<Option<(String, usize)>, SeqError> {
        while let Some(line) = self.read_line()? {
            let t = line.trim();
            if !t.is_empty() {
                return Ok(Some((t.to_string(), self.line_no)));
            }
        }
        Ok(None)
    }

    fn header_id(line: &str) -> String {
        line[1..].split_whitespace().next().unwrap_or("").to_string()
    }

    fn next_fasta(&mut self) -> Result<Option<SeqRecord>, SeqError> {
        let Some((header, header_line)) = self.pending.take() else {
            return Ok(None);
        };
        if !header.starts_with('>') {
            return Err(SeqError::MalformedRecord { line: header_line });
        }
        let mut seq = Vec::new();
        while let Some((line, no)) = self.next_nonblank_line()? {
            if line.starts_with('>') {
                self.pending = Some((line, no));
                break;
            }
            seq.extend_from_slice(line.as_bytes());
        }
        if seq.is_empty() {
            return Err(SeqError::MalformedRecord { line: header_line });
        }
        Ok(Some(SeqRecord {
            id: Self::header_id(&header),
            seq,
            qual: None,
        }))
    }

    fn next_fastq(&mut self) -> Result<Option<SeqRecord>, SeqError> {
        let Some((header, header_line)) = self.pending.take() else {
            return Ok(None);
        };
        if !header.starts_with('@') {
            return Err(SeqError::MalformedRecord { line: header_line });
        }
        let truncated = |line| SeqError::MalformedRecord { line };
        let seq = self.read_line()?.ok_or(truncated(self.line_no + 1))?;
        let plus = self.read_line()?.ok_or(truncated(self.line_no + 1))?;
        if !plus.starts_with('+') {
            return Err(truncated(self.line_no));
        }
        let qual = self.read_line()?.ok_or(truncated(self.line_no + 1))?;
        let (seq, qual) = (seq.trim(), qual.trim());
        if seq.is_empty() || qual.len() != seq.len() {
            return Err(truncated(self.line_no));
        }
        let rec = SeqRecord {
            id: Self::header_id(&header),
            seq: seq.as_bytes().to_vec(),
            qual: Some(qual.as_bytes().to_vec()),
        };
        self.pending = self.next_nonblank_line()?;
        Ok(Some(rec))
    }
}

impl<R: BufRead> Iterator for SequenceReader<R> {
    type Item = Result<SeqRecord, SeqError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let res = match self.format {
            Format::Fasta => self.next_fasta(),
            Format::Fastq => self.next_fastq(),
        };
        match res {
            Ok(Some(rec)) => Some(Ok(rec)),
            Ok(None) => {
                self.done = true;
                None
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

/// Write one FASTA record, wrapping the sequence at 80 columns.
pub fn write_fasta_record<W: Write>(w: &mut W, header: &str, seq: &[u8]) -> std::io::Result<()> {
    writeln!(w, ">{header}")?;
    for line in seq.chunks(FASTA_LINE_WIDTH) {
        w.write_all(line)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}
