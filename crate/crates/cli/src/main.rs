use std::process::ExitCode;

use clap::Parser;
use herd_cli::app::{run, Cli, Exit, Format};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Exit::InputError.code() } else { 0 });
        }
    };
    let outcome = match run(&cli) {
        Ok(outcome) => outcome,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit().code());
        }
    };
    if let Some(path) = &cli.report {
        if let Err(e) = std::fs::write(path, outcome.report.to_json() + "\n") {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(Exit::InputError.code());
        }
    }
    match cli.format {
        Format::Text => print!("{}", outcome.text),
        Format::Json => println!("{}", outcome.report.to_json()),
    }
    ExitCode::from(outcome.exit.code())
}
