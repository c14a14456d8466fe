fn main() {
    std::process::exit(iitaka_cli::run(std::env::args_os()));
}
