fn main() {
    std::process::exit(rmtlab::cli::main_with_args(std::env::args_os()));
}
