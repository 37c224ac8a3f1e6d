fn main() {
    std::process::exit(pattern_waits::cli::main());
}
