fn main() {
    std::process::exit(hh_integrable::cli::run(std::env::args_os()));
}
