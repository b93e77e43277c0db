use std::io::{Read, Write};
use std::net::TcpStream;
use std::path::Path;
use std::process::{Command, Output, Stdio};
use std::time::{Duration, Instant};

use miniasm_testkit::{write_reads, TINY_READS};

const DEFAULT_XML: &str = "<settings>
  <pipeline name=\"default\">
    <phase>miniasm.ScanReadsPhase</phase>\t\t
    <phase>miniasm.BuildGraphPhase</phase>\t\t
    <phase>miniasm.FindTipsPhase</phase>
    <phase>miniasm.ComputeCoveragePhase</phase>\t\t\t
    <phase>miniasm.FindPathsPhase</phase>\t\t\t
  </pipeline>
</settings>
";

fn miniasm(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_miniasm"))
        .args(args)
        .current_dir(dir)
        .env("RUST_LOG", "info")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn tiny_dir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    write_reads(&dir.path().join("tiny.fa"), &TINY_READS);
    std::fs::write(dir.path().join("settings.xml"), DEFAULT_XML).unwrap();
    dir
}

#[test]
fn tiny_fixture_with_default_settings_file() {
    let dir = tiny_dir();
    let out = miniasm(dir.path(), &["-input", "tiny.fa", "-k", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let lines: Vec<String> = stdout(&out).lines().map(String::from).collect();
    assert_eq!(lines.len(), 5);
    let names = [
        "miniasm.ScanReadsPhase",
        "miniasm.BuildGraphPhase",
        "miniasm.FindTipsPhase",
        "miniasm.ComputeCoveragePhase",
        "miniasm.FindPathsPhase",
    ];
    let added = ["inputFormat,reads", "graph", "tips", "coverage", "contigs"];
    for ((line, name), keys) in lines.iter().zip(names).zip(added) {
        let prefix = format!("{name} ok ");
        assert!(line.starts_with(&prefix), "{line}");
        let rest = &line[prefix.len()..];
        let (ms, tail) = rest.split_once("ms ").unwrap();
        assert!(ms.parse::<u64>().is_ok(), "{line}");
        assert_eq!(tail, format!("added=[{keys}]"));
    }
    let fasta = std::fs::read_to_string(dir.path().join("contigs.fa")).unwrap();
    assert_eq!(fasta, ">contig_0 length=5 cov=1.00\nAAACC\n");
    assert!(stderr(&out).contains("3 nodes"));
}

#[test]
fn builtin_pipelines_without_settings_file() {
    let dir = tempfile::tempdir().unwrap();
    write_reads(&dir.path().join("r.fa"), &["ACGACGACG"]);
    let out = miniasm(dir.path(), &["-input", "r.fa", "-k", "7", "-pipeline", "repeats", "-output", "out.fa"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out).lines().count(), 6);
    assert!(stderr(&out).contains("Finding repeats..."));
    assert!(stderr(&out).contains("Contig: ACGACGACG pattern: ACGACGACG start offset: 0"));
    assert!(dir.path().join("out.fa").exists());
}

#[test]
fn unknown_pipeline_lists_available() {
    let dir = tiny_dir();
    let out = miniasm(dir.path(), &["-input", "tiny.fa", "-k", "3", "-pipeline", "nope"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("available: default"), "{}", stderr(&out));
    assert!(!dir.path().join("contigs.fa").exists());
}

#[test]
fn argument_errors_exit_2() {
    let dir = tiny_dir();
    for (args, needle) in [
        (vec!["-k", "31"], "MissingInput"),
        (vec!["-input", "tiny.fa", "-k", "30"], "BadK"),
        (vec!["-input", "tiny.fa", "-x", "1"], "UnknownFlag"),
    ] {
        let out = miniasm(dir.path(), &args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = stderr(&out);
        assert!(err.contains(needle), "{err}");
        assert!(err.contains("usage: miniasm"), "{err}");
    }
    let out = miniasm(dir.path(), &["-help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("usage"));
}

#[test]
fn failed_phase_exits_1() {
    let dir = tiny_dir();
    let out = miniasm(dir.path(), &["-input", "absent.fa", "-k", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("miniasm.ScanReadsPhase failed("), "{text}");
    assert!(!dir.path().join("contigs.fa").exists());
}

#[test]
fn explicit_settings_must_exist() {
    let dir = tiny_dir();
    let out = miniasm(dir.path(), &["-input", "tiny.fa", "-k", "3", "-settings", "nope.xml"]);
    assert_eq!(out.status.code(), Some(1));
    std::fs::write(dir.path().join("bad.xml"), "<settings><pipeline>").unwrap();
    let out = miniasm(dir.path(), &["-input", "tiny.fa", "-k", "3", "-settings", "bad.xml"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line"), "{}", stderr(&out));
}

#[test]
fn unwritable_output_exits_1() {
    let dir = tiny_dir();
    let out = miniasm(dir.path(), &["-input", "tiny.fa", "-k", "3", "-output", "no/such/dir/c.fa"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out).lines().count(), 5);
}

fn http_get(port: u16, path: &str) -> Option<String> {
    let mut s = TcpStream::connect(("127.0.0.1", port)).ok()?;
    s.set_read_timeout(Some(Duration::from_secs(5))).ok()?;
    write!(s, "GET {path} HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n").ok()?;
    let mut buf = String::new();
    s.read_to_string(&mut buf).ok()?;
    Some(buf)
}

#[test]
fn serve_mode_starts_the_api() {
    let port = {
        let l = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
        l.local_addr().unwrap().port()
    };
    let dir = tiny_dir();
    let mut child = Command::new(env!("CARGO_BIN_EXE_miniasm"))
        .args(["-serve", &port.to_string()])
        .current_dir(dir.path())
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let deadline = Instant::now() + Duration::from_secs(20);
    let mut body = None;
    while Instant::now() < deadline {
        if let Some(resp) = http_get(port, "/pipelines") {
            body = Some(resp);
            break;
        }
        std::thread::sleep(Duration::from_millis(50));
    }
    child.kill().unwrap();
    child.wait().unwrap();
    let body = body.expect("server did not answer");
    assert!(body.starts_with("HTTP/1.1 200"), "{body}");
    assert!(body.contains("miniasm.FindPathsPhase"), "{body}");
}
