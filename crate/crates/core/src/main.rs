fn main() {
    std::process::exit(backflow::cli::main_with_args(std::env::args_os()));
}
