fn main() {
    std::process::exit(zecklab_cli::run(std::env::args_os()));
}
