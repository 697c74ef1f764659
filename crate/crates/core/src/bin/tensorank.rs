fn main() {
    std::process::exit(tensorank::cli::run(std::env::args_os()));
}
