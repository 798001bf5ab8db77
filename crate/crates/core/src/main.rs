fn main() {
    std::process::exit(relaypower::cli::run(std::env::args_os()));
}
