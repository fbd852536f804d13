fn main() {
    std::process::exit(dggsdim::cli::main());
}
