fn main() {
    std::process::exit(srl_soa::cli::run_from(std::env::args_os()));
}
