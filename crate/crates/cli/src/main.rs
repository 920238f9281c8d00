fn main() {
    std::process::exit(qjc_cli::run(std::env::args_os()));
}
