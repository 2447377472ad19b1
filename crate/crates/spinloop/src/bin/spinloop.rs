fn main() {
    std::process::exit(spinloop::cli::run(std::env::args_os()));
}
