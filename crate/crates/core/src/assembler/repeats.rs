use serde::Serialize;

use super::AssemblyError;

/// A tandem repeat inside a sequence: `reps` full copies of a primitive
/// motif starting at `start`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Repeat {
    pub start: usize,
    pub span_length: usize,
    pub motif: String,
}

impl Repeat {
    pub fn repetitions(&self) -> usize {
        self.span_length / self.motif.len()
    }

    /// The spanned text: the motif written out `repetitions` times.
    pub fn display_pattern(&self) -> String {
        self.motif.repeat(self.repetitions())
    }
}

pub const DEFAULT_MIN_TOT_LEN: usize = 8;
pub const DEFAULT_MIN_MOTIF_LEN: usize = 3;

pub fn check_repeat_params(min_tot_len: usize, min_motif_len: usize) -> Result<(), AssemblyError> {
    if min_motif_len < 1 {
        return Err(AssemblyError::BadParam {
            name: "minMotifLen",
            reason: "must be at least 1".into(),
        });
    }
    if min_tot_len < 2 * min_motif_len {
        return Err(AssemblyError::BadParam {
            name: "minTotLen",
            reason: format!("must be at least 2 x minMotifLen ({})", 2 * min_motif_len),
        });
    }
    Ok(())
}

/// True if `m` is not a power of a shorter string.
fn is_primitive(m: &[u8]) -> bool {
    // prefix function: border of the whole motif
    let n = m.len();
    let mut pi = vec![0usize; n];
    for i in 1..n {
        let mut j = pi[i - 1];
        while j > 0 && m[i] != m[j] {
            j = pi[j - 1];
        }
        if m[i] == m[j] {
            j += 1;
        }
        pi[i] = j;
    }
    let border = pi[n - 1];
    border == 0 || n % (n - border) != 0
}

/// All maximal tandem repeats of `seq`.
///
/// For each period `p >= min_motif_len` the scan finds maximal stretches
/// where `seq[i] == seq[i + p]`; a stretch of length `L >= p` starting at
/// `i` is a periodic run over `[i, i + L + p)`. The run is reported once,
/// at its leftmost position, with as many full copies of the motif
/// `seq[i..i + p]` as fit; a trailing partial copy is not counted. Runs
/// whose motif is not primitive belong to a shorter period and are skipped.
///
/// Hits are ordered by start, then motif length.
pub fn find_repeats(seq: &[u8], min_tot_len: usize, min_motif_len: usize) -> Result<Vec<Repeat>, AssemblyError> {
    check_repeat_params(min_tot_len, min_motif_len)?;
    let n = seq.len();
    let mut hits = Vec::new();
    for p in min_motif_len..=n / 2 {
        let mut i = 0;
        while i + p < n {
            if seq[i] != seq[i + p] {
                i += 1;
                continue;
            }
            let start = i;
            while i + p < n && seq[i] == seq[i + p] {
                i += 1;
            }
            let run = i - start + p;
            let reps = run / p;
            let span = reps * p;
            if reps >= 2 && span >= min_tot_len && is_primitive(&seq[start..start + p]) {
                hits.push(Repeat {
                    start,
                    span_length: span,
                    motif: String::from_utf8_lossy(&seq[start..start + p]).into_owned(),
                });
            }
        }
    }
    hits.sort_by_key(|h| (h.start, h.motif.len()));
    Ok(hits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tuples(s: &str, tot: usize, motif: usize) -> Vec<(usize, usize, String)> {
        find_repeats(s.as_bytes(), tot, motif)
            .unwrap()
            .into_iter()
            .map(|r| (r.start, r.span_length, r.motif))
            .collect()
    }

    #[test]
    fn three_copies() {
        assert_eq!(tuples("ACGACGACG", 8, 3), vec![(0, 9, "ACG".to_string())]);
    }

    #[test]
    fn incomplete_second_copy() {
        assert!(tuples("ACGTACGA", 8, 3).is_empty());
    }

    #[test]
    fn rotations_are_one_hit() {
        assert_eq!(tuples("ACGACGACGA", 8, 3), vec![(0, 9, "ACG".to_string())]);
        assert_eq!(tuples("TTACGACGACGA", 8, 3), vec![(2, 9, "ACG".to_string())]);
    }

    #[test]
    fn non_primitive_motifs_skipped() {
        assert!(tuples("AAAAAAAAAAAA", 8, 3).is_empty());
        // ACAC... has period 2, below minMotifLen; ACACAC is not primitive
        assert!(tuples("ACACACACACACACAC", 8, 3).is_empty());
        assert_eq!(tuples("ACACACACACACACAC", 8, 2), vec![(0, 16, "AC".to_string())]);
    }

    #[test]
    fn offset_299_exemplar() {
        let prefix = "TTTAAGT";
        let mut contig = "G".repeat(299 - prefix.len());
        contig.push_str(prefix);
        contig.push_str("TGTCTCCTAGTGTCTCCTAGTGT");
        contig.push_str("CAAGG");
        let hits = find_repeats(contig.as_bytes(), 8, 3).unwrap();
        let hit = hits.iter().find(|h| h.motif.len() == 10).unwrap();
        assert_eq!(hit.start, 299);
        assert_eq!(hit.span_length, 20);
        assert_eq!(hit.motif, "TGTCTCCTAG");
        assert_eq!(hit.display_pattern(), "TGTCTCCTAGTGTCTCCTAG");
    }

    #[test]
    fn bad_params() {
        assert!(find_repeats(b"ACGT", 8, 0).is_err());
        assert!(find_repeats(b"ACGT", 5, 3).is_err());
        assert!(find_repeats(b"ACGT", 6, 3).is_ok());
    }

    #[test]
    fn primitive_check() {
        assert!(is_primitive(b"ACG"));
        assert!(is_primitive(b"ABA"));
        assert!(!is_primitive(b"ACAC"));
        assert!(!is_primitive(b"AAA"));
        assert!(is_primitive(b"A"));
    }

    proptest! {
        #[test]
        fn agrees_with_brute_force(s in "[ACGT]{0,60}", motif in 1usize..5, extra in 0usize..6) {
            let tot = 2 * motif + extra;
            prop_assert_eq!(tuples(&s, tot, motif), miniasm_testkit::brute_force_repeats(&s, tot, motif));
        }

        #[test]
        fn hits_are_real_repeats(s in "[AC]{0,80}") {
            for r in find_repeats(s.as_bytes(), 4, 2).unwrap() {
                prop_assert!(r.repetitions() >= 2);
                prop_assert_eq!(&s[r.start..r.start + r.span_length], r.display_pattern());
            }
        }
    }
}
