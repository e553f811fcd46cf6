use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = lsnet::Cli::parse();
    match lsnet::run(cli) {
        Ok(report) => {
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            println!("{} done: {} file(s) written", report.command, report.files.len());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
