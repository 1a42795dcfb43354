fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .format_target(false)
        .init();
    std::process::exit(gvi_cli::run_main(std::env::args_os()));
}
