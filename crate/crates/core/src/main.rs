fn main() {
    std::process::exit(renga::cli::main());
}
