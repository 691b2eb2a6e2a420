use std::process::ExitCode;

use clap::Parser;
use wigner_cli::{execute, Cli, BUDGET_ENV};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let budget = std::env::var(BUDGET_ENV).ok();
    ExitCode::from(execute(cli, budget.as_deref()) as u8)
}
