fn main() {
    std::process::exit(fhrn::cli::main_with_args(std::env::args_os()));
}
