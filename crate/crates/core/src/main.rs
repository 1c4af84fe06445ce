fn main() {
    std::process::exit(grapde::cli::run(std::env::args_os()));
}
