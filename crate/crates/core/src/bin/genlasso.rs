fn main() {
    std::process::exit(genlasso::cli::run(std::env::args_os()));
}
