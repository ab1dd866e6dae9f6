mod args;
mod config;
mod outcome;
mod run;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Format};
use config::RunConfig;
use outcome::Failure;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            return ExitCode::from(code);
        }
    };
    let name = run::command_name(&cli.command);
    let outcome = RunConfig::from_flags(&cli.common)
        .map_err(Failure::from)
        .and_then(|cfg| run::dispatch(&cli.command, &cfg, cli.common.all_basis).map(|o| (cfg, o)));
    match outcome {
        Ok((cfg, o)) => {
            match cli.common.format {
                Format::Json => {
                    println!("{}", serde_json::to_string_pretty(&o.envelope(name, &cfg)).expect("serializable"))
                }
                Format::Text => print!("{}", o.text),
            }
            if o.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("{name}: verification failed");
                ExitCode::from(2)
            }
        }
        Err(f) => {
            eprintln!("{name}: {}", f.message());
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
