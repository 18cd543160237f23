fn main() {
    std::process::exit(fvkit::cli::main_with(std::env::args()));
}
