fn main() {
    std::process::exit(robustsim::cli::run_cli(std::env::args_os()));
}
