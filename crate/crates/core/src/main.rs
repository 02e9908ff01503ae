fn main() {
    std::process::exit(gramem::cli::main());
}
