fn main() {
    std::process::exit(lcu::cli::run_cli(std::env::args_os()));
}
