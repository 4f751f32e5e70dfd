fn main() {
    std::process::exit(levyspace::cli::main_with_args(std::env::args_os()));
}
