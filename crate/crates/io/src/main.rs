fn main() {
    std::process::exit(polyflex_io::cli::main_with_args(std::env::args_os()));
}
