use std::io::Write;
use std::process::ExitCode;

use conecut_cli::{parse_args, run};

fn main() -> ExitCode {
    let cfg = match parse_args(std::env::args_os()) {
        Ok(cfg) => cfg,
        Err(e) => {
            // clap prints help/version to stdout and usage errors to stderr
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let text = match run(&cfg) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("conecut {}: error: {e}", cfg.command_name());
            return ExitCode::from(1);
        }
    };
    let written = match &cfg.output {
        Some(path) => std::fs::write(path, text.as_bytes()),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("conecut: cannot write report: {e}");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
