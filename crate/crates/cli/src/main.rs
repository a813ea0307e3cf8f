use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use lorentz_causal_cli::{run, Cli, EXIT_CONFIG};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => {
            let written = match &cli.common.output {
                Some(path) => fs::write(path, &text).map_err(|e| format!("writing {}: {e}", path.display())),
                None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => ExitCode::SUCCESS,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    ExitCode::from(EXIT_CONFIG as u8)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}
