fn main() {
    std::process::exit(kaczmarz_cli::run(std::env::args_os()));
}
