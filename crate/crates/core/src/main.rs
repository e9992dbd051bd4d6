fn main() {
    std::process::exit(signed_harmonics::cli::run(std::env::args_os()));
}
