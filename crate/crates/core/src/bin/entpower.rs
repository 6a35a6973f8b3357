fn main() {
    std::process::exit(entpower::cli::run_from_args(std::env::args_os()));
}
