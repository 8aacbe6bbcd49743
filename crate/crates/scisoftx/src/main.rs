fn main() {
    std::process::exit(scisoftx::cli::run(std::env::args_os()));
}
