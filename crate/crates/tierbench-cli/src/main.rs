fn main() {
    std::process::exit(tierbench_cli::run(std::env::args_os()));
}
