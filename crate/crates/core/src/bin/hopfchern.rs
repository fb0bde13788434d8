fn main() {
    std::process::exit(hopfchern::cli::run(std::env::args()));
}
