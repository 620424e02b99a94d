fn main() {
    std::process::exit(udnsim::cli::main_with(std::env::args_os()));
}
