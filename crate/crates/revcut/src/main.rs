fn main() {
    std::process::exit(revcut::cli::run());
}
