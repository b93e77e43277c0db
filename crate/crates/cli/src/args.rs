use std::path::PathBuf;

use miniasm_core::assembler::{DEFAULT_K, DEFAULT_PIPELINE};
use miniasm_core::seq::validate_k;
use thiserror::Error;

pub const USAGE: &str = "\
usage: miniasm -input <reads.fa|reads.fq> [options]
       miniasm -serve <port> [-settings <file>]

options:
  -input <path>      reads in FASTA or FASTQ format (required in batch mode)
  -k <int>           odd k-mer length, 3..63 (default 31)
  -pipeline <name>   pipeline to run (default \"default\")
  -settings <path>   pipeline settings XML (default settings.xml, falling back
                     to the built-in pipelines when that file does not exist)
  -output <path>     contig FASTA output (default contigs.fa)
  -cut <int>         minimum node coverage for contigs (default 0)
  -serve <port>      start the HTTP session API on 127.0.0.1:<port>
  -help              print this message";

pub const DEFAULT_SETTINGS_FILE: &str = "settings.xml";
pub const DEFAULT_OUTPUT: &str = "contigs.fa";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliArgs {
    pub input: PathBuf,
    pub k: usize,
    pub pipeline: String,
    pub settings_file: PathBuf,
    /// Whether `-settings` was given; only then is a missing file an error.
    pub settings_explicit: bool,
    pub output: PathBuf,
    pub cut: u32,
    pub serve: Option<u16>,
}

impl Default for CliArgs {
    fn default() -> Self {
        CliArgs {
            input: PathBuf::new(),
            k: DEFAULT_K,
            pipeline: DEFAULT_PIPELINE.to_string(),
            settings_file: PathBuf::from(DEFAULT_SETTINGS_FILE),
            settings_explicit: false,
            output: PathBuf::from(DEFAULT_OUTPUT),
            cut: 0,
            serve: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArgError {
    #[error("MissingInput: -input is required")]
    MissingInput,
    #[error("BadK: k must be odd and between 3 and 63, got {0}")]
    BadK(String),
    #[error("UnknownFlag: {0}")]
    UnknownFlag(String),
    #[error("flag {0} needs a value")]
    MissingValue(String),
    #[error("bad value {value:?} for {flag}")]
    BadValue { flag: String, value: String },
    #[error("help requested")]
    Help,
}

/// Parse single-dash flags, each followed by its value, in any order.
pub fn parse_args<I, S>(argv: I) -> Result<CliArgs, ArgError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut args = CliArgs::default();
    let mut input = None;
    let mut it = argv.into_iter();
    while let Some(flag) = it.next() {
        let flag = flag.as_ref().to_string();
        if matches!(flag.as_str(), "-help" | "-h" | "--help") {
            return Err(ArgError::Help);
        }
        let known = ["-input", "-k", "-pipeline", "-settings", "-output", "-cut", "-serve"];
        if !known.contains(&flag.as_str()) {
            return Err(ArgError::UnknownFlag(flag));
        }
        let value = it
            .next()
            .map(|v| v.as_ref().to_string())
            .ok_or_else(|| ArgError::MissingValue(flag.clone()))?;
        let bad = || ArgError::BadValue {
            flag: flag.clone(),
            value: value.clone(),
        };
        match flag.as_str() {
            "-input" => input = Some(PathBuf::from(&value)),
            "-k" => {
                let k: usize = value.parse().map_err(|_| ArgError::BadK(value.clone()))?;
                validate_k(k).map_err(|_| ArgError::BadK(value.clone()))?;
                args.k = k;
            }
            "-pipeline" => args.pipeline = value,
            "-settings" => {
                args.settings_file = PathBuf::from(&value);
                args.settings_explicit = true;
            }
            "-output" => args.output = PathBuf::from(&value),
            "-cut" => args.cut = value.parse().map_err(|_| bad())?,
            "-serve" => args.serve = Some(value.parse().map_err(|_| bad())?),
            _ => unreachable!(),
        }
    }
    match input {
        Some(p) => args.input = p,
        None if args.serve.is_some() => {}
        None => return Err(ArgError::MissingInput),
    }
    Ok(args)
}
