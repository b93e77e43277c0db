//! Command-line front end: batch assembly runs and the `-serve` mode.

mod args;

use std::io::Write;
use std::net::{Ipv4Addr, SocketAddr};

use miniasm_core::assembler::{
    default_settings, init_data, keys, phase_registry, write_contig_file, AssemblySettings, ContigSet,
};
use miniasm_core::pipeline::{run_pipeline, PipelineError, Settings};
use miniasm_service::ServiceConfig;

pub use args::{parse_args, ArgError, CliArgs, DEFAULT_OUTPUT, DEFAULT_SETTINGS_FILE, USAGE};

/// Read the settings file, or use the built-in pipelines when the default
/// file is absent.
pub fn load_settings(args: &CliArgs) -> Result<Settings, String> {
    if !args.settings_explicit && !args.settings_file.exists() {
        log::info!("{} not found, using built-in pipelines", args.settings_file.display());
        return Ok(default_settings());
    }
    let text = std::fs::read_to_string(&args.settings_file)
        .map_err(|e| format!("cannot read {}: {e}", args.settings_file.display()))?;
    Settings::parse(&text).map_err(|e| format!("{}: {e}", args.settings_file.display()))
}

/// Run the requested pipeline, printing one report line per phase to
/// `out`. Returns the process exit code.
pub fn run_batch(args: &CliArgs, out: &mut impl Write) -> i32 {
    let settings = match load_settings(args) {
        Ok(s) => s,
        Err(e) => {
            log::error!("{e}");
            return 1;
        }
    };
    let Some(spec) = settings.pipeline(&args.pipeline) else {
        let e = PipelineError::UnknownPipeline {
            name: args.pipeline.clone(),
            available: settings.names().into_iter().map(String::from).collect(),
        };
        log::error!("{e}");
        return 1;
    };

    let mut assembly = AssemblySettings::new(&args.input).with_k(args.k).with_cut(args.cut);
    assembly.pipeline_name = args.pipeline.clone();
    let mut data = match init_data(assembly) {
        Ok(d) => d,
        Err(e) => {
            log::error!("{e}");
            return 2;
        }
    };

    let reports = match run_pipeline(&phase_registry(), spec, &mut data) {
        Ok(r) => r,
        Err(e) => {
            log::error!("{e}");
            return 1;
        }
    };
    let mut ok = reports.len() == spec.phases.len();
    for r in &reports {
        for line in &r.log {
            log::info!("{}: {line}", r.phase_name);
        }
        if writeln!(out, "{r}").is_err() {
            ok = false;
        }
        ok &= r.is_ok();
    }

    if let Ok(contigs) = data.get_as::<ContigSet>(keys::CONTIGS) {
        match write_contig_file(&contigs.0, &args.output) {
            Ok(()) => log::info!("wrote {} contigs to {}", contigs.0.len(), args.output.display()),
            Err(e) => {
                log::error!("cannot write {}: {e}", args.output.display());
                ok = false;
            }
        }
    }
    if ok {
        0
    } else {
        1
    }
}

/// Start the session API and block until it stops.
pub fn run_server(args: &CliArgs, port: u16) -> i32 {
    let settings = match load_settings(args) {
        Ok(s) => s,
        Err(e) => {
            log::error!("{e}");
            return 1;
        }
    };
    let config = ServiceConfig {
        settings,
        ..ServiceConfig::default()
    };
    let runtime = match tokio::runtime::Builder::new_multi_thread().enable_all().build() {
        Ok(r) => r,
        Err(e) => {
            log::error!("cannot start runtime: {e}");
            return 1;
        }
    };
    let addr = SocketAddr::from((Ipv4Addr::LOCALHOST, port));
    match runtime.block_on(miniasm_service::serve(addr, config)) {
        Ok(()) => 0,
        Err(e) => {
            log::error!("server error: {e}");
            1
        }
    }
}

/// Entry point shared by the binary: parse, dispatch, return exit code.
pub fn main_with_args<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let args = match parse_args(argv) {
        Ok(a) => a,
        Err(ArgError::Help) => {
            println!("{USAGE}");
            return 0;
        }
        Err(e) => {
            eprintln!("error: {e}\n\n{USAGE}");
            return 2;
        }
    };
    match args.serve {
        Some(port) => run_server(&args, port),
        None => run_batch(&args, &mut std::io::stdout().lock()),
    }
}
