use std::collections::BTreeSet;
use std::fs::File;
use std::io::BufReader;

use rayon::prelude::*;

use super::repeats::{check_repeat_params, DEFAULT_MIN_MOTIF_LEN, DEFAULT_MIN_TOT_LEN};
use super::{keys, AssemblySettings, Contig, ContigSet, ReadSet, RepeatHit, RepeatSet, TipSet};
use crate::debruijn::{coverage_histogram, extract_paths, find_tips, spell, DeBruijnGraph, GraphBuilder, Path};
use crate::pipeline::{Params, Phase, PhaseContext, PhaseContract, PhaseError};
use crate::seq::{read_sequences, PackedSeq, Read, SeqRecord};

fn settings(ctx: &PhaseContext<'_>) -> Result<AssemblySettings, PhaseError> {
    Ok(ctx.get_as::<AssemblySettings>(keys::SETTINGS)?.clone())
}

/// Reads the input file named in `settings`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ScanReadsPhase;

/// Split a record on `N` into maximal N-free fragments. Returns the kept
/// reads and the number of non-empty fragments shorter than `k`.
fn split_on_n(rec: SeqRecord, k: usize) -> Result<(Vec<Read>, usize), PhaseError> {
    if !rec.seq.iter().any(|b| matches!(b, b'N' | b'n')) {
        return Ok((vec![Read::from_record(rec)?], 0));
    }
    let mut kept = Vec::new();
    let mut dropped = 0;
    let mut start = 0;
    let mut part = 0;
    let n = rec.seq.len();
    for end in 0..=n {
        if end < n && !matches!(rec.seq[end], b'N' | b'n') {
            continue;
        }
        if end > start {
            part += 1;
            if end - start >= k {
                let seq = PackedSeq::encode(&rec.seq[start..end])?;
                let qual = rec
                    .qual
                    .as_ref()
                    .map(|q| String::from_utf8_lossy(&q[start..end]).into_owned());
                kept.push(Read::new(format!("{}/{}", rec.id, part), seq, qual)?);
            } else {
                dropped += 1;
            }
        }
        start = end + 1;
    }
    Ok((kept, dropped))
}

impl Phase for ScanReadsPhase {
    fn name(&self) -> &str {
        "miniasm.ScanReadsPhase"
    }

    fn contract(&self) -> PhaseContract {
        PhaseContract::new([keys::SETTINGS], [keys::READS, keys::INPUT_FORMAT])
    }

    fn run(&self, ctx: &mut PhaseContext<'_>) -> Result<(), PhaseError> {
        let s = settings(ctx)?;
        let file = File::open(&s.input_path)
            .map_err(|e| PhaseError::Failed(format!("cannot open {}: {e}", s.input_path.display())))?;
        let reader = read_sequences(BufReader::new(file))?;
        let format = reader.format();
        ctx.log(format.to_string());

        let mut set = ReadSet::default();
        for rec in reader {
            let (reads, dropped) = split_on_n(rec?, s.k)?;
            set.reads.extend(reads);
            set.dropped_fragments += dropped;
        }
        ctx.log(format!("{} reads", set.reads.len()));
        if set.dropped_fragments > 0 {
            ctx.log(format!(
                "warning: dropped {} N-split fragments shorter than k={}",
                set.dropped_fragments, s.k
            ));
        }
        ctx.put(keys::READS, set)?;
        ctx.put(keys::INPUT_FORMAT, format.to_string())?;
        Ok(())
    }
}

/// Builds the de Bruijn graph from `reads` at the configured k.
#[derive(Debug, Clone, Copy, Default)]
pub struct BuildGraphPhase;

impl Phase for BuildGraphPhase {
    fn name(&self) -> &str {
        "miniasm.BuildGraphPhase"
    }

    fn contract(&self) -> PhaseContract {
        PhaseContract::new([keys::READS, keys::SETTINGS], [keys::GRAPH])
    }

    fn run(&self, ctx: &mut PhaseContext<'_>) -> Result<(), PhaseError> {
        let k = settings(ctx)?.k;
        let reads = ctx.get_as::<ReadSet>(keys::READS)?;
        let mut builder = GraphBuilder::new(k)?;
        for r in &reads.reads {
            builder.add(&r.seq);
        }
        let g = builder.finish();
        let stats = g.stats();
        ctx.log(format!("{} nodes", g.node_count()));
        ctx.log(format!("{} edges", g.edge_count()));
        ctx.log(format!("{} k-mers, {} distinct", stats.kmers_ingested, g.node_count()));
        if stats.skipped_reads > 0 {
            ctx.log(format!("{} reads shorter than k skipped", stats.skipped_reads));
        }
        let saturated = g.saturated_nodes();
        if saturated > 0 {
            ctx.log(format!("warning: coverage saturated on {saturated} nodes"));
        }
        ctx.put(keys::GRAPH, g)?;
        Ok(())
    }
}

/// Marks short dead-end chains. Parameter `maxTipLen` overrides the
/// setting.
#[derive(Debug, Clone, Copy, Default)]
pub struct FindTipsPhase;

impl Phase for FindTipsPhase {
    fn name(&self) -> &str {
        "miniasm.FindTipsPhase"
    }

    fn contract(&self) -> PhaseContract {
        PhaseContract::new([keys::GRAPH, keys::SETTINGS], [keys::TIPS])
    }

    fn run(&self, ctx: &mut PhaseContext<'_>) -> Result<(), PhaseError> {
        let max = match ctx.params().get::<usize>("maxTipLen")? {
            Some(m) => m,
            None => settings(ctx)?.max_tip_len(),
        };
        let g = ctx.get_as::<DeBruijnGraph>(keys::GRAPH)?;
        let tips = find_tips(g, max)?;
        ctx.log(format!("{} tip nodes (maxTipLen {max})", tips.len()));
        ctx.put(keys::TIPS, TipSet(tips))?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ComputeCoveragePhase;

impl Phase for ComputeCoveragePhase {
    fn name(&self) -> &str {
        "miniasm.ComputeCoveragePhase"
    }

    fn contract(&self) -> PhaseContract {
        PhaseContract::new([keys::GRAPH], [keys::COVERAGE])
    }

    fn run(&self, ctx: &mut PhaseContext<'_>) -> Result<(), PhaseError> {
        let stats = coverage_histogram(ctx.get_as::<DeBruijnGraph>(keys::GRAPH)?);
        ctx.log(format!("mean coverage {:.2} over {} nodes", stats.mean, stats.nodes));
        ctx.put(keys::COVERAGE, stats)?;
        Ok(())
    }
}

/// Extracts contigs from unambiguous paths. Parameter `cut` overrides the
/// setting; `tips` is used when present.
#[derive(Debug, Clone, Copy, Default)]
pub struct FindPathsPhase;

fn path_contig(g: &DeBruijnGraph, p: &Path) -> (PackedSeq, f64) {
    let total: u64 = p
        .nodes
        .iter()
        .map(|n| g.coverage(&n.node).unwrap_or(0) as u64)
        .sum();
    (spell(p, g.k()), total as f64 / p.len().max(1) as f64)
}

impl Phase for FindPathsPhase {
    fn name(&self) -> &str {
        "miniasm.FindPathsPhase"
    }

    fn contract(&self) -> PhaseContract {
        PhaseContract::new([keys::GRAPH, keys::SETTINGS], [keys::CONTIGS])
    }

    fn run(&self, ctx: &mut PhaseContext<'_>) -> Result<(), PhaseError> {
        let cut = match ctx.params().get::<u32>("cut")? {
            Some(c) => c,
            None => settings(ctx)?.cut,
        };
        let empty = BTreeSet::new();
        let tips = if ctx.contains(keys::TIPS) {
            &ctx.get_as::<TipSet>(keys::TIPS)?.0
        } else {
            &empty
        };
        let g = ctx.get_as::<DeBruijnGraph>(keys::GRAPH)?;
        let paths = extract_paths(g, cut, tips);
        let mut spelled: Vec<(PackedSeq, f64)> = paths.par_iter().map(|p| path_contig(g, p)).collect();
        spelled.par_sort_by(|a, b| a.0.cmp(&b.0));
        let contigs = ContigSet(
            spelled
                .into_iter()
                .enumerate()
                .map(|(id, (seq, avg_coverage))| Contig { id, seq, avg_coverage })
                .collect(),
        );
        let tip_count = tips.len();
        ctx.log(format!("cut {cut}, {tip_count} tip nodes excluded"));
        ctx.log(format!("{} contigs", contigs.0.len()));
        if !contigs.0.is_empty() {
            ctx.log(format!("largest contig {} bp", contigs.largest()));
        }
        ctx.put(keys::CONTIGS, contigs)?;
        Ok(())
    }
}

/// Tandem repeats in every contig. Parameters `minTotLen`, `minMotifLen`.
#[derive(Debug, Clone, Copy, Default)]
pub struct FindRepeatsPhase;

impl Phase for FindRepeatsPhase {
    fn name(&self) -> &str {
        "miniasm.FindRepeatsPhase"
    }

    fn contract(&self) -> PhaseContract {
        PhaseContract::new([keys::CONTIGS], [keys::REPEATS])
    }

    fn default_params(&self) -> Params {
        Params::new()
            .with("minTotLen", DEFAULT_MIN_TOT_LEN)
            .with("minMotifLen", DEFAULT_MIN_MOTIF_LEN)
    }

    fn run(&self, ctx: &mut PhaseContext<'_>) -> Result<(), PhaseError> {
        let min_tot = ctx.params().get::<usize>("minTotLen")?.unwrap_or(DEFAULT_MIN_TOT_LEN);
        let min_motif = ctx.params().get::<usize>("minMotifLen")?.unwrap_or(DEFAULT_MIN_MOTIF_LEN);
        check_repeat_params(min_tot, min_motif)?;
        ctx.log("Finding repeats...");
        let contigs = &ctx.get_as::<ContigSet>(keys::CONTIGS)?.0;
        let per_contig: Vec<Vec<RepeatHit>> = contigs
            .par_iter()
            .map(|c| c.repeats(min_tot, min_motif))
            .collect::<Result<_, _>>()?;
        let mut lines = Vec::new();
        for (c, hits) in contigs.iter().zip(&per_contig) {
            for h in hits {
                lines.push(format!(
                    "Contig: {c} pattern: {} start offset: {}",
                    h.display_pattern, h.start
                ));
            }
        }
        for line in lines {
            ctx.log(line);
        }
        let hits: Vec<RepeatHit> = per_contig.into_iter().flatten().collect();
        ctx.put(keys::REPEATS, RepeatSet(hits))?;
        Ok(())
    }
}
