fn main() {
    std::process::exit(qws_cli::run(std::env::args_os()));
}
