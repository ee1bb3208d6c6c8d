fn main() {
    std::process::exit(prc_cli::run(std::env::args_os()));
}
