fn main() {
    std::process::exit(bindcert::cli::run(std::env::args_os()));
}
