fn main() {
    std::process::exit(transcend_ug::cli::run(std::env::args_os()));
}
