fn main() {
    let args: Vec<String> = std::env::args().collect();
    let code = locc_core::cli::run_command(&args);
    std::process::exit(code);
}
