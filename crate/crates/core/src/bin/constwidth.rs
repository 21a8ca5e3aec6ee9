use std::io;
use std::process::ExitCode;

use clap::Parser;
use constwidth::cli::{run, RunConfig};

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors
    let config = RunConfig::parse();
    let status = run(&config, &mut io::stdout().lock(), &mut io::stderr().lock());
    ExitCode::from(status as u8)
}
