fn main() {
    std::process::exit(hybrid_hopf::cli::main_with(std::env::args_os()));
}
