fn main() {
    std::process::exit(qabench::cli::run(std::env::args_os()));
}
