fn main() {
    std::process::exit(anytime::cli::run(std::env::args_os()));
}
