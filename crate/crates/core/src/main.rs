fn main() {
    std::process::exit(halphen::cli::cli_main(std::env::args_os()));
}
