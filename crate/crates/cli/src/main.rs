fn main() {
    std::process::exit(rtfw_cli::run(std::env::args_os()));
}
