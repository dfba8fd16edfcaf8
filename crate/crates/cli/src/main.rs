fn main() {
    std::process::exit(effres_cli::run(std::env::args_os()));
}
