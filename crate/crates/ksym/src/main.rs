fn main() {
    let seed = std::env::var("KSYM_SEED").ok();
    let code = ksym::cli::run(std::env::args_os(), seed.as_deref(), &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
