fn main() {
    std::process::exit(rydswap::cli::run(std::env::args_os()));
}
