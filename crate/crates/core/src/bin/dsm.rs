fn main() {
    let code = dsm_lab::cli::run_subcommand(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
