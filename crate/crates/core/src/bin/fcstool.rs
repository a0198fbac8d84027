fn main() {
    std::process::exit(fcs::cli::main());
}
