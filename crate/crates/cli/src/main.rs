fn main() {
    std::process::exit(glassbench_cli::main_with_args(std::env::args_os()));
}
