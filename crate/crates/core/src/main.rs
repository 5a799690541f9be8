fn main() {
    std::process::exit(qramp::cli::run(std::env::args_os()));
}
