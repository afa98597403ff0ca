fn main() {
    std::process::exit(dephasim::cli::main_exit_code());
}
