fn main() {
    std::process::exit(levy_schemes::cli::run(std::env::args_os()));
}
