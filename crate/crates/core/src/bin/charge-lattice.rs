fn main() {
    std::process::exit(charge_lattice::cli::main_with_args(std::env::args_os()));
}
