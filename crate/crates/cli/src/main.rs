use std::process::ExitCode;

use clap::Parser;
use gvlab::args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match gvlab::run(cli) {
        Ok(rep) => {
            for l in &rep.lines {
                println!("{l}");
            }
            for n in &rep.notes {
                eprintln!("note: {n}");
            }
            for c in &rep.checks {
                println!("{c}");
            }
            for a in &rep.artifacts {
                eprintln!("wrote {}", a.display());
            }
            if rep.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
