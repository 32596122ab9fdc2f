use clap::Parser;

use boltzmann_cli::{execute, exit_code, Cli};

fn main() {
    let cli = Cli::parse();
    let result = execute(&cli.command);
    match &result {
        Ok(outcome) if outcome.checks_failed => eprintln!("boltzmann: checks failed"),
        Ok(_) => {}
        Err(e) => eprintln!("boltzmann: {e}"),
    }
    std::process::exit(exit_code(&result));
}
