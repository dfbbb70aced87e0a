fn main() {
    std::process::exit(bb84_cli::main_with_args(std::env::args()));
}
