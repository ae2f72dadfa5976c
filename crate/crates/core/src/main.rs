fn main() {
    std::process::exit(equivext::cli::run());
}
