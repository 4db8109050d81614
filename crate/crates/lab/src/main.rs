fn main() {
    std::process::exit(mhdlab::cli::run_from(std::env::args_os()));
}
