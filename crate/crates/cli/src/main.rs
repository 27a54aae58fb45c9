fn main() {
    std::process::exit(heightlab_cli::main_with_args(std::env::args_os()));
}
