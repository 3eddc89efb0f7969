use std::process::ExitCode;

use clap::Parser;
use morseflow::cli::Cli;
use morseflow::commands::run;
use morseflow::error::EXIT_INPUT;

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT as u8 } else { 0 });
        }
    };
    match run(&cli, &argv) {
        Ok(outcome) => {
            for m in &outcome.messages {
                eprintln!("{m}");
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
