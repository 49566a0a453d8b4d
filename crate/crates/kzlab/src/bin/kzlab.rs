fn main() {
    std::process::exit(kzlab::cli::run());
}
