fn main() {
    std::process::exit(hardy_cli::cli::main_with(std::env::args_os()));
}
