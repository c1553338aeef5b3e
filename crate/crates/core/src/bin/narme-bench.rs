fn main() {
    std::process::exit(narme::cli::run(std::env::args_os()));
}
