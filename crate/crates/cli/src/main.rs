fn main() {
    std::process::exit(rankscope_cli::run(std::env::args_os()));
}
