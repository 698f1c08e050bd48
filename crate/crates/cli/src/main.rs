fn main() {
    let code = symhyp_cli::main_with_args(std::env::args(), &mut std::io::stdout());
    std::process::exit(code);
}
