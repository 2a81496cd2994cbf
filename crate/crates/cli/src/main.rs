use clap::Parser;
use henon_cli::{execute, resolve_config, Cli};
use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match resolve_config(&cli) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    if cli.global.dump_config {
        println!("{}", serde_json::to_string_pretty(&cfg).expect("config serializes"));
        return ExitCode::SUCCESS;
    }
    let outcome = match execute(&cli.command, &cfg) {
        Ok(o) => o,
        Err(e) => return fail(&e),
    };
    let written = match &cfg.out {
        Some(path) => std::fs::write(path, &outcome.body),
        None => std::io::stdout().lock().write_all(outcome.body.as_bytes()),
    };
    if let Err(e) = written {
        return fail(&e.into());
    }
    eprintln!("{}", outcome.summary);
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn fail(e: &henon_cli::CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(2)
}
