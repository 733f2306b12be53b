use std::io::{self, BufWriter, Write};

fn main() {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let code = pworlds_cli::run(std::env::args_os(), &mut out, &mut io::stderr().lock());
    let _ = out.flush();
    std::process::exit(code);
}
