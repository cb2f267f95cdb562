fn main() {
    std::process::exit(hyperell::cli::main_exit_code());
}
