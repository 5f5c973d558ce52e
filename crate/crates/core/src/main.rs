use std::process::ExitCode;

use clap::Parser;
use wgverify::cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match execute(&cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wgverify: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
