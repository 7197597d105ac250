fn main() {
    std::process::exit(drstokes::cli::run(std::env::args_os()));
}
