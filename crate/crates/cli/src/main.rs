use std::fs;
use std::process::ExitCode;

use clap::Parser;
use pbnq_cli::commands::{run, Cli};
use pbnq_cli::{Outcome, EXIT_INVALID};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome { document, summary, code }) => {
            match (document, &cli.out) {
                (Some(doc), Some(path)) => {
                    if let Err(e) = fs::write(path, doc) {
                        eprintln!("error: {}: {e}", path.display());
                        return ExitCode::from(EXIT_INVALID as u8);
                    }
                    println!("{summary}");
                }
                (Some(doc), None) => {
                    print!("{doc}");
                    eprintln!("{summary}");
                }
                (None, _) => println!("{summary}"),
            }
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INVALID as u8)
        }
    }
}
