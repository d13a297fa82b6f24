fn main() {
    std::process::exit(rmframe_cli::main_with_args(std::env::args_os()));
}
