use std::io::{self, Write};

fn main() {
    let stdin = io::stdin();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let code = triq_cli::run(std::env::args_os(), &mut stdin.lock(), &mut out, &mut io::stderr());
    let _ = out.flush();
    std::process::exit(code);
}
