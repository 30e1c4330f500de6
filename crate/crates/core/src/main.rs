fn main() {
    let strategy = fpc::cli::strategy_from_env();
    let code = fpc::cli::run(std::env::args_os(), strategy, &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
