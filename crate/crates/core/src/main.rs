fn main() {
    std::process::exit(tfloc::cli::run(std::env::args_os()));
}
