fn main() {
    std::process::exit(gegenorm::cli::run(std::env::args_os()));
}
