fn main() {
    std::process::exit(eacw::cli::main_entry());
}
