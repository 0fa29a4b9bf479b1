fn main() {
    std::process::exit(pacmart::harness::cli_main(std::env::args_os()));
}
