use std::io;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("HEADMT_LOG", "warn")).init();
    let stdin = io::stdin();
    let code = headmt::run(std::env::args_os(), stdin.lock(), &mut io::stdout().lock(), &mut io::stderr().lock());
    std::process::exit(code);
}
