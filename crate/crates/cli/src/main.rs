fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(choquard_cli::run_command(&argv));
}
