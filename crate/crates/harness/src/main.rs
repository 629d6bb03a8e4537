fn main() {
    std::process::exit(harness::cli::cli_main(std::env::args_os()));
}
