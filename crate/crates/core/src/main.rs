use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use infogeo::cli::{execute, Cli};
use infogeo::Error;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(e @ Error::Domain(_)) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let written = match &outcome.out {
        Some(path) => fs::write(path, &outcome.document),
        None => io::stdout().lock().write_all(outcome.document.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(2);
    }
    eprint!("{}", outcome.summary);
    if outcome.success {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
