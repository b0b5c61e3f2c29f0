fn main() {
    std::process::exit(degpar_cli::cli_main(std::env::args_os()));
}
