fn main() {
    std::process::exit(pauli_forge::cli::run(std::env::args_os()));
}
