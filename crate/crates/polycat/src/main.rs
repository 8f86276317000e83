use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use polycat::commands::{configure_guard, run, Cli};
use polycat::Failure;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = configure_guard(std::env::var("POLYCAT_GUARD").ok().as_deref()).and_then(|_| run(cli.command));
    match result {
        Ok(out) => {
            print!("{out}");
            let _ = std::io::stdout().flush();
            ExitCode::SUCCESS
        }
        Err(e) => report(e),
    }
}

fn report(e: Failure) -> ExitCode {
    eprintln!("polycat: {e}");
    ExitCode::from(e.exit_code())
}
