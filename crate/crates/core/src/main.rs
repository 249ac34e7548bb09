fn main() {
    std::process::exit(mermin_coa::cli::main_exit_code());
}
