fn main() {
    std::process::exit(sphere_sfwm::cli::main_with_args(std::env::args_os()));
}
