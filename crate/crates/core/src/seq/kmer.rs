use std::fmt;

use serde::{Serialize, Serializer};

use super::packed::{base_to_code, code_to_base, PackedSeq};
use super::SeqError;

pub const MAX_K: usize = 63;

/// Check that `k` is odd and in `3..=63`.
pub fn validate_k(k: usize) -> Result<usize, SeqError> {
    if k > 1 && k <= MAX_K && k % 2 == 1 {
        Ok(k)
    } else {
        Err(SeqError::BadK(k))
    }
}

#[inline]
fn mask(k: u8) -> u128 {
    (1u128 << (2 * k as u32)) - 1
}

/// Reverse complement of a packed word holding `k` bases.
#[inline]
fn revcomp_word(word: u128, k: u8) -> u128 {
    const M2: u128 = 0x3333_3333_3333_3333_3333_3333_3333_3333;
    const M4: u128 = 0x0F0F_0F0F_0F0F_0F0F_0F0F_0F0F_0F0F_0F0F;
    let mut x = !word;
    x = ((x >> 2) & M2) | ((x & M2) << 2);
    x = ((x >> 4) & M4) | ((x & M4) << 4);
    x = x.swap_bytes();
    x >> (128 - 2 * k as u32)
}

/// A fixed-length k-mer packed into one word, first base in the most
/// significant pair. For equal `k`, numeric order of the word is the
/// lexicographic order of the bases.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Kmer {
    k: u8,
    word: u128,
}

impl Kmer {
    /// Build from a raw word; bits above `2k` must be zero.
    pub fn from_word(word: u128, k: usize) -> Result<Self, SeqError> {
        validate_k(k)?;
        debug_assert_eq!(word & !mask(k as u8), 0);
        Ok(Kmer {
            k: k as u8,
            word: word & mask(k as u8),
        })
    }

    #[inline]
    pub(crate) fn from_word_unchecked(word: u128, k: u8) -> Self {
        Kmer { k, word }
    }

    pub fn from_ascii(s: &[u8]) -> Result<Self, SeqError> {
        validate_k(s.len())?;
        let mut word = 0u128;
        for (position, &b) in s.iter().enumerate() {
            let c = base_to_code(b).ok_or(SeqError::InvalidBase {
                position,
                ch: b as char,
            })?;
            word = (word << 2) | c as u128;
        }
        Ok(Kmer {
            k: s.len() as u8,
            word,
        })
    }

    pub fn k(&self) -> usize {
        self.k as usize
    }

    pub fn word(&self) -> u128 {
        self.word
    }

    /// Code of base `i` (0 = first).
    #[inline]
    pub fn base(&self, i: usize) -> u8 {
        debug_assert!(i < self.k());
        ((self.word >> (2 * (self.k() - 1 - i))) & 3) as u8
    }

    #[inline]
    pub fn first_base(&self) -> u8 {
        self.base(0)
    }

    #[inline]
    pub fn last_base(&self) -> u8 {
        (self.word & 3) as u8
    }

    #[inline]
    pub fn reverse_complement(&self) -> Self {
        Kmer {
            k: self.k,
            word: revcomp_word(self.word, self.k),
        }
    }

    #[inline]
    pub fn canonical(&self) -> Self {
        let rc = self.reverse_complement();
        if rc.word < self.word {
            rc
        } else {
            *self
        }
    }

    #[inline]
    pub fn is_canonical(&self) -> bool {
        self.word <= revcomp_word(self.word, self.k)
    }

    /// Drop the first base and append `code` at the end.
    #[inline]
    pub fn extend_right(&self, code: u8) -> Self {
        Kmer {
            k: self.k,
            word: ((self.word << 2) | code as u128) & mask(self.k),
        }
    }

    /// Drop the last base and prepend `code` at the front.
    #[inline]
    pub fn extend_left(&self, code: u8) -> Self {
        Kmer {
            k: self.k,
            word: (self.word >> 2) | ((code as u128) << (2 * (self.k as u32 - 1))),
        }
    }

    pub fn to_packed(&self) -> PackedSeq {
        PackedSeq::from_codes((0..self.k()).map(|i| self.base(i)))
    }
}

impl fmt::Display for Kmer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.k()).map(|i| code_to_base(self.base(i)) as char).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for Kmer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Kmer({self})")
    }
}

impl std::str::FromStr for Kmer {
    type Err = SeqError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_ascii(s.as_bytes())
    }
}

impl Serialize for Kmer {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Left-to-right k-mer windows of a packed sequence, produced by shifting
/// in one base per step.
pub struct Kmers<'a> {
    seq: &'a PackedSeq,
    k: u8,
    next: usize,
    word: u128,
}

impl Iterator for Kmers<'_> {
    type Item = Kmer;

    #[inline]
    fn next(&mut self) -> Option<Kmer> {
        if self.next >= self.seq.len() {
            return None;
        }
        self.word = ((self.word << 2) | self.seq.get(self.next) as u128) & mask(self.k);
        self.next += 1;
        Some(Kmer::from_word_unchecked(self.word, self.k))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.seq.len() - self.next;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Kmers<'_> {}

/// Enumerate the `max(0, len - k + 1)` k-mers of `seq`.
pub fn kmers(seq: &PackedSeq, k: usize) -> Result<Kmers<'_>, SeqError> {
    let k = validate_k(k)?;
    let mut it = Kmers {
        seq,
        k: k as u8,
        next: 0,
        word: 0,
    };
    if seq.len() < k {
        it.next = seq.len();
    } else {
        for i in 0..k - 1 {
            it.word = (it.word << 2) | seq.get(i) as u128;
        }
        it.next = k - 1;
    }
    Ok(it)
}
