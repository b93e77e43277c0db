//! Read simulation shared by the benchmarks.

use miniasm_core::seq::PackedSeq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A uniformly random genome of `len` bases.
pub fn random_genome(seed: u64, len: usize) -> PackedSeq {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PackedSeq::from_codes((0..len).map(|_| rng.gen_range(0..4u8)))
}

/// Error-free reads at `coverage`-fold depth from random positions and
/// strands of `genome`.
pub fn simulate_reads(seed: u64, genome: &PackedSeq, coverage: usize, read_len: usize) -> Vec<PackedSeq> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = (genome.len() * coverage).div_ceil(read_len);
    (0..n)
        .map(|_| {
            let start = rng.gen_range(0..=genome.len() - read_len);
            let r = genome.slice(start, start + read_len);
            if rng.gen_bool(0.5) {
                r.reverse_complement()
            } else {
                r
            }
        })
        .collect()
}

/// A random string over `ACGT` with a few tandem repeats spliced in.
pub fn repeat_rich_contig(seed: u64, len: usize) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(len);
    while out.len() < len {
        if rng.gen_bool(0.02) {
            let motif: Vec<u8> = (0..rng.gen_range(3..12)).map(|_| b"ACGT"[rng.gen_range(0..4)]).collect();
            for _ in 0..rng.gen_range(2..6) {
                out.extend_from_slice(&motif);
            }
        } else {
            out.push(b"ACGT"[rng.gen_range(0..4)]);
        }
    }
    out.truncate(len);
    out
}
