use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use exodromy_cli::{run, Cli, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = std::panic::catch_unwind(|| run(&cli));
    let mut stdout = std::io::stdout().lock();
    match result {
        Ok(Ok(text)) => {
            let _ = stdout.write_all(text.as_bytes());
            ExitCode::SUCCESS
        }
        Ok(Err(err)) => {
            if let CliError::Uncertified { output, .. } = &err {
                let _ = stdout.write_all(output.as_bytes());
            }
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
        // a tripped assertion inside the library
        Err(_) => ExitCode::from(5),
    }
}
