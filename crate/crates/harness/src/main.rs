fn main() {
    std::process::exit(subdiff_harness::cli::cli_main(std::env::args_os()));
}
