fn main() {
    let filter = std::env::var("ADUGS_LOG").unwrap_or_else(|_| "warn".into());
    env_logger::Builder::new()
        .parse_filters(&filter)
        .target(env_logger::Target::Stderr)
        .init();
    std::process::exit(dynvo::harness::cli::main_with_args(std::env::args_os()));
}
