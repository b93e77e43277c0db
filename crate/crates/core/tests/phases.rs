use std::collections::BTreeSet;
use std::path::Path;

use miniasm_core::assembler::{
    find_repeats, init_data, keys, phase_registry, AssemblySettings, ContigSet, ReadSet, RepeatSet, TipSet,
};
use miniasm_core::debruijn::{
    build_graph, coverage_histogram, extract_paths, find_tips, spell, CoverageStats, DeBruijnGraph,
};
use miniasm_core::pipeline::{
    audit_append_only, run_phase, run_pipeline, DataObject, Failure, Params, PhaseStatus, PipelineSpec, Value,
};
use miniasm_core::seq::PackedSeq;
use miniasm_testkit::{write_fasta, write_reads, TINY_K, TINY_READS};

const SCAN: &str = "miniasm.ScanReadsPhase";
const BUILD: &str = "miniasm.BuildGraphPhase";
const TIPS: &str = "miniasm.FindTipsPhase";
const COVERAGE: &str = "miniasm.ComputeCoveragePhase";
const PATHS: &str = "miniasm.FindPathsPhase";
const REPEATS: &str = "miniasm.FindRepeatsPhase";

fn seeded(path: &Path, k: usize) -> DataObject {
    init_data(AssemblySettings::new(path).with_k(k)).unwrap()
}

/// Run a phase and check the append-only audit independently of the runner.
fn step(d: &mut DataObject, name: &str, params: Params) -> PhaseStatus {
    let before: Vec<(String, Value)> = d.entries().map(|(k, v)| (k.to_string(), v.clone())).collect();
    let phase = phase_registry().resolve(name).unwrap();
    let report = run_phase(phase.as_ref(), d, &params);
    assert_eq!(audit_append_only(&before, d), None, "{name} removed or replaced a key");
    report.status
}

fn run_all(d: &mut DataObject, names: &[&str]) {
    for n in names {
        let status = step(d, n, Params::new());
        assert!(status.is_ok(), "{n}: {status}");
    }
}

fn contig_strings(d: &DataObject) -> Vec<String> {
    d.get_as::<ContigSet>(keys::CONTIGS).unwrap().0.iter().map(|c| c.seq.decode()).collect()
}

#[test]
fn scan_two_record_fasta() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_fasta(&dir.path().join("r.fa"), &[("a", "ACGTACGT"), ("b", "TTGCA")]);
    let mut d = seeded(&path, 3);
    assert!(step(&mut d, SCAN, Params::new()).is_ok());
    assert_eq!(d.get_as::<ReadSet>(keys::READS).unwrap().reads.len(), 2);
    assert_eq!(d.get_as::<String>(keys::INPUT_FORMAT).unwrap(), "Fasta format");
    assert_eq!(d.lineage().last().unwrap().log[0], "Fasta format");
}

#[test]
fn scan_fastq() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.fq");
    std::fs::write(&path, "@a\nACGTA\n+\nIIIII\n").unwrap();
    let mut d = seeded(&path, 3);
    assert!(step(&mut d, SCAN, Params::new()).is_ok());
    assert_eq!(d.get_as::<String>(keys::INPUT_FORMAT).unwrap(), "Fastq format");
    let reads = &d.get_as::<ReadSet>(keys::READS).unwrap().reads;
    assert_eq!(reads[0].quality.as_deref(), Some("IIIII"));
}

#[test]
fn scan_splits_on_n() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_fasta(&dir.path().join("r.fa"), &[("a", "AANAA"), ("b", "ACGTNNCAGGT")]);
    let mut d = seeded(&path, 3);
    assert!(step(&mut d, SCAN, Params::new()).is_ok());
    let set = d.get_as::<ReadSet>(keys::READS).unwrap();
    let kept: Vec<(String, String)> = set.reads.iter().map(|r| (r.id.clone(), r.seq.decode())).collect();
    assert_eq!(kept, vec![("b/1".into(), "ACGT".into()), ("b/2".into(), "CAGGT".into())]);
    assert_eq!(set.dropped_fragments, 2);
    assert!(d.lineage().last().unwrap().log.iter().any(|l| l.starts_with("warning")));
}

#[test]
fn scan_short_fragments_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_fasta(&dir.path().join("r.fa"), &[("a", "AANAA")]);
    let mut d = seeded(&path, 3);
    assert!(step(&mut d, SCAN, Params::new()).is_ok());
    assert_eq!(d.get_as::<ReadSet>(keys::READS).unwrap().reads.len(), 0);
    assert!(d.lineage().last().unwrap().log.iter().any(|l| l.contains("dropped 2")));
}

#[test]
fn scan_missing_file_leaves_data_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let mut d = seeded(&dir.path().join("absent.fa"), 3);
    let status = step(&mut d, SCAN, Params::new());
    assert!(matches!(status, PhaseStatus::Failed(Failure::Error(_))));
    assert_eq!(d.keys(), BTreeSet::from(["settings".to_string()]));
    assert_eq!(d.lineage().len(), 2);
}

#[test]
fn scan_bad_base_fails() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_fasta(&dir.path().join("r.fa"), &[("a", "ACGXT")]);
    let mut d = seeded(&path, 3);
    assert!(!step(&mut d, SCAN, Params::new()).is_ok());
    assert!(!d.contains(keys::READS));
}

#[test]
fn build_graph_tiny() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_reads(&dir.path().join("r.fa"), &TINY_READS);
    let mut d = seeded(&path, TINY_K);
    run_all(&mut d, &[SCAN, BUILD]);
    let g = d.get_as::<DeBruijnGraph>(keys::GRAPH).unwrap();
    assert_eq!(g.node_count(), 3);
    assert_eq!(g.edge_count(), 2);
    let log = &d.lineage().last().unwrap().log;
    assert_eq!(log[0], "3 nodes");
    assert_eq!(log[1], "2 edges");
}

#[test]
fn build_graph_empty_reads() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.fa");
    std::fs::write(&path, "").unwrap();
    let mut d = seeded(&path, 3);
    run_all(&mut d, &[SCAN, BUILD]);
    assert!(d.get_as::<DeBruijnGraph>(keys::GRAPH).unwrap().is_empty());
}

#[test]
fn build_graph_without_reads() {
    let mut d = seeded(Path::new("r.fa"), 3);
    assert_eq!(
        step(&mut d, BUILD, Params::new()),
        PhaseStatus::Failed(Failure::Precondition(vec!["reads".into()]))
    );
}

#[test]
fn tips_lifted() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_reads(&dir.path().join("r.fa"), &["AAACCC", "AACG"]);
    let mut d = seeded(&path, 3);
    run_all(&mut d, &[SCAN, BUILD]);
    let mut with_param = d.clone();
    assert!(step(&mut with_param, TIPS, Params::new().with("maxTipLen", 6)).is_ok());
    let tips: Vec<String> = with_param.get_as::<TipSet>(keys::TIPS).unwrap().0.iter().map(|k| k.to_string()).collect();
    assert_eq!(tips, vec!["ACG"]);

    let mut zero = d.clone();
    let status = step(&mut zero, TIPS, Params::new().with("maxTipLen", 0));
    assert!(matches!(status, PhaseStatus::Failed(Failure::Error(ref m)) if m.contains("BadParam")));

    // default maxTipLen = 2k
    run_all(&mut d, &[TIPS, PATHS]);
    assert_eq!(d.get_as::<TipSet>(keys::TIPS).unwrap().0.len(), 1);
    let contigs = contig_strings(&d);
    assert!(contigs.iter().all(|c| !c.contains("ACG") && !c.contains("CGT")), "{contigs:?}");
}

#[test]
fn tips_pure_chain() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_reads(&dir.path().join("r.fa"), &["AAACCTG"]);
    let mut d = seeded(&path, 3);
    run_all(&mut d, &[SCAN, BUILD, TIPS]);
    assert!(d.get_as::<TipSet>(keys::TIPS).unwrap().0.is_empty());
}

#[test]
fn coverage_lifted() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_reads(&dir.path().join("r.fa"), &["AAA", "AAA", "AAC"]);
    let mut d = seeded(&path, 3);
    run_all(&mut d, &[SCAN, BUILD, COVERAGE]);
    let c = d.get_as::<CoverageStats>(keys::COVERAGE).unwrap();
    assert_eq!(c.histogram.iter().map(|(a, b)| (*a, *b)).collect::<Vec<_>>(), vec![(1, 1), (2, 1)]);
    assert_eq!(c.mean, 1.5);

    let path = write_reads(&dir.path().join("e.fa"), &["AC"]);
    let mut d = seeded(&path, 3);
    run_all(&mut d, &[SCAN, BUILD, COVERAGE]);
    let c = d.get_as::<CoverageStats>(keys::COVERAGE).unwrap();
    assert!(c.empty_graph && c.mean == 0.0);

    let path = write_reads(&dir.path().join("s.fa"), &["AAA"; 5]);
    let mut d = seeded(&path, 3);
    run_all(&mut d, &[SCAN, BUILD, COVERAGE]);
    let c = d.get_as::<CoverageStats>(keys::COVERAGE).unwrap();
    assert_eq!(c.histogram.get(&5), Some(&1));
}

#[test]
fn paths_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_reads(&dir.path().join("chain.fa"), &TINY_READS);
    let mut d = seeded(&path, 3);
    run_all(&mut d, &[SCAN, BUILD, PATHS]);
    assert_eq!(contig_strings(&d), vec!["AAACC"]);
    let contigs = d.get_as::<ContigSet>(keys::CONTIGS).unwrap();
    assert_eq!(contigs.0[0].avg_coverage, 1.0);
    assert_eq!(contigs.0[0].size(), 5);

    let path = write_reads(&dir.path().join("junction.fa"), &["AACA", "AACG"]);
    let mut d = seeded(&path, 3);
    run_all(&mut d, &[SCAN, BUILD, PATHS]);
    assert_eq!(contig_strings(&d), vec!["AAC", "ACA", "ACG"]);
    let ids: Vec<usize> = d.get_as::<ContigSet>(keys::CONTIGS).unwrap().0.iter().map(|c| c.id).collect();
    assert_eq!(ids, vec![0, 1, 2]);

    let path = write_reads(&dir.path().join("cov.fa"), &["AAACC", "AAAC", "AAAC", "AAAC", "AAAC"]);
    let mut d = init_data(AssemblySettings::new(&path).with_k(3).with_cut(2)).unwrap();
    run_all(&mut d, &[SCAN, BUILD, PATHS]);
    assert_eq!(contig_strings(&d), vec!["AAAC"]);

    // the phase parameter wins over the setting
    let mut d = seeded(&path, 3);
    run_all(&mut d, &[SCAN, BUILD]);
    assert!(step(&mut d, PATHS, Params::new().with("cut", 2)).is_ok());
    assert_eq!(contig_strings(&d), vec!["AAAC"]);
}

#[test]
fn repeats_phase() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_reads(&dir.path().join("r.fa"), &["ACGACGACG"]);
    let mut d = seeded(&path, 7);
    run_all(&mut d, &[SCAN, BUILD, PATHS]);
    assert_eq!(contig_strings(&d), vec!["ACGACGACG"]);

    let mut base = d.clone();
    assert!(step(&mut base, REPEATS, Params::new()).is_ok());
    let hits = &base.get_as::<RepeatSet>(keys::REPEATS).unwrap().0;
    assert_eq!(hits.len(), 1);
    assert_eq!((hits[0].start, hits[0].span_length, hits[0].motif.as_str()), (0, 9, "ACG"));
    let log = &base.lineage().last().unwrap().log;
    assert_eq!(log[0], "Finding repeats...");
    assert_eq!(log[1], "Contig: ACGACGACG pattern: ACGACGACG start offset: 0");

    let mut strict = d.clone();
    let params = Params::new().with("minTotLen", 20).with("minMotifLen", 10);
    assert!(step(&mut strict, REPEATS, params).is_ok());
    assert!(strict.get_as::<RepeatSet>(keys::REPEATS).unwrap().0.is_empty());

    let mut bad = d.clone();
    let status = step(&mut bad, REPEATS, Params::new().with("minTotLen", 5));
    assert!(!status.is_ok());
    assert!(!bad.contains(keys::REPEATS));
}

#[test]
fn repeats_on_no_contigs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.fa");
    std::fs::write(&path, "").unwrap();
    let mut d = seeded(&path, 3);
    run_all(&mut d, &[SCAN, BUILD, PATHS, REPEATS]);
    assert!(d.get_as::<RepeatSet>(keys::REPEATS).unwrap().0.is_empty());
}

#[test]
fn repeats_from_pipeline_params() {
    let xml = r#"<settings><pipeline name="strict">
        <phase>miniasm.ScanReadsPhase</phase>
        <phase>miniasm.BuildGraphPhase</phase>
        <phase>miniasm.FindPathsPhase</phase>
        <phase>miniasm.FindRepeatsPhase<param name="minTotLen" value="20"/><param name="minMotifLen" value="10"/></phase>
    </pipeline></settings>"#;
    let settings = miniasm_core::Settings::parse(xml).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = write_reads(&dir.path().join("r.fa"), &["ACGACGACG"]);
    let mut d = seeded(&path, 7);
    let reports = run_pipeline(&phase_registry(), settings.pipeline("strict").unwrap(), &mut d).unwrap();
    assert!(reports.iter().all(|r| r.is_ok()));
    assert!(d.get_as::<RepeatSet>(keys::REPEATS).unwrap().0.is_empty());
}

#[test]
fn pipeline_equals_direct_calls() {
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(99);
    let genome = miniasm_testkit::random_dna(&mut rng, 600);
    let mut reads = miniasm_testkit::tiling_reads(&genome, 50);
    // a few reads with a substitution to create tips and low-coverage nodes
    for i in [10usize, 200, 420] {
        let mut r = reads[i].clone().into_bytes();
        r[45] = if r[45] == b'A' { b'C' } else { b'A' };
        reads.push(String::from_utf8(r).unwrap());
    }
    let dir = tempfile::tempdir().unwrap();
    let path = write_reads(&dir.path().join("r.fa"), &reads);
    let k = 15;
    let mut d = init_data(AssemblySettings::new(&path).with_k(k).with_cut(2)).unwrap();
    let spec = PipelineSpec::new(
        "full",
        [SCAN, BUILD, TIPS, COVERAGE, PATHS, REPEATS],
    );
    let reports = run_pipeline(&phase_registry(), &spec, &mut d).unwrap();
    assert_eq!(reports.len(), 6);
    assert!(reports.iter().all(|r| r.is_ok()));

    let packed: Vec<PackedSeq> = reads.iter().map(|r| r.parse().unwrap()).collect();
    let g = build_graph(&packed, k).unwrap();
    let tips = find_tips(&g, 2 * k).unwrap();
    assert_eq!(d.get_as::<TipSet>(keys::TIPS).unwrap().0, tips);
    assert_eq!(d.get_as::<CoverageStats>(keys::COVERAGE).unwrap(), &coverage_histogram(&g));
    let mut direct: Vec<String> = extract_paths(&g, 2, &tips).iter().map(|p| spell(p, k).decode()).collect();
    direct.sort();
    assert_eq!(contig_strings(&d), direct);

    let mut direct_hits = Vec::new();
    for (id, c) in direct.iter().enumerate() {
        for r in find_repeats(c.as_bytes(), 8, 3).unwrap() {
            direct_hits.push((id, r.start, r.span_length, r.motif));
        }
    }
    let hits: Vec<_> = d
        .get_as::<RepeatSet>(keys::REPEATS)
        .unwrap()
        .0
        .iter()
        .map(|h| (h.contig_id, h.start, h.span_length, h.motif.clone()))
        .collect();
    assert_eq!(hits, direct_hits);
    for h in &d.get_as::<RepeatSet>(keys::REPEATS).unwrap().0 {
        assert_eq!(&direct[h.contig_id][h.start..h.start + h.span_length], h.display_pattern);
    }

    let keys: Vec<String> = d.keys().into_iter().collect();
    assert_eq!(
        keys,
        vec!["contigs", "coverage", "graph", "inputFormat", "reads", "repeats", "settings", "tips"]
    );
}

#[test]
fn contig_numbering_is_stable_under_read_order() {
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3);
    let genome = miniasm_testkit::random_dna(&mut rng, 400);
    let mut reads = miniasm_testkit::tiling_reads(&genome, 30);
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for i in 0..3 {
        use rand::seq::SliceRandom;
        reads.shuffle(&mut rng);
        let path = write_reads(&dir.path().join(format!("r{i}.fa")), &reads);
        let mut d = seeded(&path, 9);
        run_all(&mut d, &[SCAN, BUILD, TIPS, PATHS]);
        let set = d.get_as::<ContigSet>(keys::CONTIGS).unwrap();
        let mut out = Vec::new();
        miniasm_core::assembler::write_contigs(&mut out, &set.0).unwrap();
        outputs.push(out);
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[1], outputs[2]);
}
