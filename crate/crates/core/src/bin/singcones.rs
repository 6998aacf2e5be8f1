fn main() {
    std::process::exit(singular_cones::cli::run(std::env::args_os()));
}
