fn main() {
    std::process::exit(curvecert::cli::main());
}
