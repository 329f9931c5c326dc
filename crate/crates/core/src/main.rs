fn main() {
    std::process::exit(lobsim::cli::run_cli(std::env::args_os()));
}
