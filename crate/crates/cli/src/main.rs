fn main() {
    std::process::exit(chaoscs_cli::run(std::env::args_os()));
}
