fn main() {
    std::process::exit(pdcons_harness::cli::cli_main(std::env::args_os()));
}
