fn main() {
    std::process::exit(ttstar::cli::run());
}
