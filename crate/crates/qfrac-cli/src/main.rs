fn main() {
    std::process::exit(qfrac_cli::run(std::env::args_os()));
}
