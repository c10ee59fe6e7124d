fn main() {
    std::process::exit(eigmatch::cli::main_with_args(std::env::args_os()));
}
