fn main() {
    std::process::exit(opcheck::cli::run(std::env::args_os()));
}
