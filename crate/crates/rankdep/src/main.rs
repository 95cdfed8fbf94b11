fn main() {
    std::process::exit(rankdep::cli::run(std::env::args_os()));
}
