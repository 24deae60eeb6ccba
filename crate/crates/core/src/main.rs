fn main() {
    std::process::exit(coupled_modes::cli::main());
}
