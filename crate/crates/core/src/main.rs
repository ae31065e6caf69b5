fn main() {
    std::process::exit(isoperim::cli::execute(std::env::args_os()));
}
