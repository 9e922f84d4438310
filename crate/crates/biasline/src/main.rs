fn main() {
    std::process::exit(biasline::cli::run(std::env::args_os()));
}
