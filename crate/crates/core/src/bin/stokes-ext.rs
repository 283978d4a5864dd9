fn main() {
    std::process::exit(stokes_ext::cli::main_with_args(std::env::args_os()));
}
