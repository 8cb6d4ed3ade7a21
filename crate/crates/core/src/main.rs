fn main() {
    let args = std::env::args().collect();
    let code = tiltlab::cli::run(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
