use std::io;
use std::process::ExitCode;

use clap::Parser;
use qherm_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli, &mut io::stdout().lock(), &mut io::stderr().lock()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("qherm: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
