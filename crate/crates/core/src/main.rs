fn main() {
    std::process::exit(ihdual::cli::main_with_args(std::env::args_os()));
}
