fn main() {
    std::process::exit(heisenberg_spherical::cli::main_with_args(std::env::args_os()));
}
