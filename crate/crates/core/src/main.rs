fn main() {
    std::process::exit(xwell::cli::dispatch(std::env::args_os()));
}
