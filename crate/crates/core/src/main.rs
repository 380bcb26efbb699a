fn main() {
    std::process::exit(debtrank::cli::main());
}
