fn main() {
    std::process::exit(spacelike_graphs::cli::run(std::env::args_os()));
}
