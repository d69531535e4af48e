fn main() {
    std::process::exit(calabi_cli::run_cli(std::env::args_os()));
}
