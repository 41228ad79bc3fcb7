fn main() {
    std::process::exit(freemoments_cli::run(std::env::args_os()));
}
