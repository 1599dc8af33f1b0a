fn main() {
    std::process::exit(wigner_lv_cli::main_with_args(std::env::args_os()));
}
