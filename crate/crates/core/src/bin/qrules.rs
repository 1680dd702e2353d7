fn main() {
    std::process::exit(qrules::cli::main());
}
