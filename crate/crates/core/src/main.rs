use std::io::Write;
use std::process::ExitCode;

use locc_core::cli;

fn main() -> ExitCode {
    let seed = match cli::seed_from_env() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(cli::EXIT_USAGE as u8);
        }
    };
    let out = cli::run(std::env::args().skip(1), seed);
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code as u8)
}
