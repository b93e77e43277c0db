fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let code = miniasm_cli::main_with_args(std::env::args().skip(1));
    std::process::exit(code);
}
