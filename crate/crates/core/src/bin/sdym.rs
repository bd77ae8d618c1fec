fn main() {
    std::process::exit(sdym_core::cli::run(std::env::args_os()));
}
