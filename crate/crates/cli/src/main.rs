fn main() {
    std::process::exit(dmax_cli::run(std::env::args_os()));
}
