use std::fmt;

use super::SeqError;

/// 2-bit code of a base: A=0, C=1, G=2, T=3. Complement is `3 - code`.
#[inline]
pub fn base_to_code(b: u8) -> Option<u8> {
    match b {
        b'A' | b'a' => Some(0),
        b'C' | b'c' => Some(1),
        b'G' | b'g' => Some(2),
        b'T' | b't' => Some(3),
        _ => None,
    }
}

#[inline]
pub fn code_to_base(c: u8) -> u8 {
    b"ACGT"[(c & 3) as usize]
}

/// A DNA sequence stored at four bases per byte.
///
/// Base 0 occupies the two most significant bits of byte 0. Unused bits
/// of the last byte are zero.
///
/// Field order matters for the derived `Ord`: comparing the zero-padded
/// payload first and the length second gives lexicographic base order.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PackedSeq {
    data: Vec<u8>,
    len: usize,
}

impl PackedSeq {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bases: usize) -> Self {
        PackedSeq {
            data: Vec::with_capacity(bases.div_ceil(4)),
            len: 0,
        }
    }

    /// Encode an ASCII DNA string. Lowercase is accepted; `N` and every
    /// other symbol is rejected.
    pub fn encode(s: &[u8]) -> Result<Self, SeqError> {
        let mut out = Self::with_capacity(s.len());
        for (position, &b) in s.iter().enumerate() {
            match base_to_code(b) {
                Some(c) => out.push(c),
                None => {
                    return Err(SeqError::InvalidBase {
                        position,
                        ch: b as char,
                    })
                }
            }
        }
        Ok(out)
    }

    pub fn from_codes<I: IntoIterator<Item = u8>>(codes: I) -> Self {
        let mut out = Self::new();
        for c in codes {
            out.push(c);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Bytes of packed payload: always `ceil(len / 4)`.
    pub fn payload_bytes(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn get(&self, i: usize) -> u8 {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        (self.data[i >> 2] >> (6 - 2 * (i & 3))) & 3
    }

    #[inline]
    pub fn push(&mut self, code: u8) {
        let slot = self.len & 3;
        if slot == 0 {
            self.data.push(0);
        }
        let last = self.data.len() - 1;
        self.data[last] |= (code & 3) << (6 - 2 * slot);
        self.len += 1;
    }

    pub fn codes(&self) -> impl ExactSizeIterator<Item = u8> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_ascii(&self) -> Vec<u8> {
        self.codes().map(code_to_base).collect()
    }

    pub fn decode(&self) -> String {
        // only ever contains ACGT
        String::from_utf8(self.to_ascii()).expect("ascii")
    }

    pub fn reverse_complement(&self) -> Self {
        let mut out = Self::with_capacity(self.len);
        for i in (0..self.len).rev() {
            out.push(3 - self.get(i));
        }
        out
    }

    /// Bases `[start, end)` as a new sequence.
    pub fn slice(&self, start: usize, end: usize) -> Self {
        assert!(start <= end && end <= self.len);
        Self::from_codes((start..end).map(|i| self.get(i)))
    }
}

impl fmt::Debug for PackedSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PackedSeq({})", self.decode())
    }
}

impl fmt::Display for PackedSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.decode())
    }
}

impl std::str::FromStr for PackedSeq {
    type Err = SeqError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::encode(s.as_bytes())
    }
}
