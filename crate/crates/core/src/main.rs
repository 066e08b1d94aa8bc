fn main() {
    std::process::exit(oscillate::cli::run_cli(std::env::args_os()));
}
