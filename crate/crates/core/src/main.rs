fn main() {
    std::process::exit(divfree_hdg::cli::main_with_args(std::env::args_os()));
}
