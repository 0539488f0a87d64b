fn main() {
    std::process::exit(slowdiv::cli::run(std::env::args_os()));
}
