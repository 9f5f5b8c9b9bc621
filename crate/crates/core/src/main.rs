fn main() {
    std::process::exit(cylrad::cli::run(std::env::args_os()));
}
