fn main() {
    std::process::exit(binmpec::cli::run(std::env::args_os()));
}
