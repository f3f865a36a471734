fn main() {
    std::process::exit(negstates::cli::main_with_args(std::env::args().collect()));
}
