use std::io::{self, IsTerminal, Read, Write};
use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let needs_stdin = !args.iter().any(|a| a == "--input" || a.starts_with("--input="))
        && !args.iter().any(|a| a == "fixtures" || a == "--help" || a == "-h" || a == "--version" || a == "-V");
    let mut input = Vec::new();
    if needs_stdin && !io::stdin().is_terminal() {
        if let Err(e) = io::stdin().read_to_end(&mut input) {
            eprintln!("error: reading stdin: {e}");
            return ExitCode::from(2);
        }
    }
    let out = stellar_cli::run(args, &input);
    io::stdout().write_all(&out.stdout).ok();
    io::stderr().write_all(out.stderr.as_bytes()).ok();
    ExitCode::from(out.code as u8)
}
