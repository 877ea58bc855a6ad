fn main() {
    std::process::exit(realsmooth::cli::run(std::env::args_os()));
}
