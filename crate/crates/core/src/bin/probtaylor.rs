fn main() {
    std::process::exit(probtaylor::cli::main());
}
