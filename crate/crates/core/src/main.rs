fn main() {
    std::process::exit(grpsel::cli::run(std::env::args_os()));
}
