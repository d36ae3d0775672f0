fn main() {
    std::process::exit(unipred::cli::main());
}
