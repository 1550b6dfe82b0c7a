fn main() {
    std::process::exit(bootucb::experiments::cli::main_with_args(std::env::args_os()));
}
