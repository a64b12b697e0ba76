fn main() {
    std::process::exit(hdc_cli::main_with_args(std::env::args_os()));
}
