//! Command-line front end for `rtfw_core`.
//!
//! Every JSON document carries a `schema` tag and the resolved command line
//! under `config`; identical invocations produce identical bytes.

mod args;
mod commands;
mod config;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;

pub use args::{Command, Format, RunConfig};
pub use commands::Failure;

const GLOBAL_WITH_VALUE: [&str; 4] = ["--config", "--out", "--format", "--jobs"];
const SUBCOMMANDS: [&str; 7] = [
    "constants",
    "table",
    "verify-bounds",
    "cutoff",
    "stability-bound",
    "solve-atom",
    "ionize",
];

/// Position of the subcommand token and the `--config` path, if any.
fn locate(argv: &[OsString]) -> (Option<usize>, Option<OsString>) {
    let mut sub = None;
    let mut config = None;
    let mut i = 1;
    while i < argv.len() {
        let tok = argv[i].to_string_lossy();
        if let Some(path) = tok.strip_prefix("--config=") {
            config = Some(OsString::from(path));
        } else if tok == "--config" {
            config = argv.get(i + 1).cloned();
            i += 1;
        } else if GLOBAL_WITH_VALUE.contains(&tok.as_ref()) {
            i += 1;
        } else if sub.is_none() && SUBCOMMANDS.contains(&tok.as_ref()) {
            sub = Some(i);
        }
        i += 1;
    }
    (sub, config)
}

fn error_json(kind: &str, message: &str) -> String {
    json!({ "schema": "rtfw.error/1", "kind": kind, "message": message }).to_string()
}

enum Parsed {
    Run(RunConfig),
    Exit(i32),
}

fn parse(argv: Vec<OsString>, out: &mut dyn Write, err: &mut dyn Write) -> Parsed {
    let (sub, config) = locate(&argv);
    let mut argv = argv;
    if let (Some(pos), Some(path)) = (sub, config) {
        match config::config_tokens(std::path::Path::new(&path)) {
            Ok(tokens) => {
                let tail = argv.split_off(pos + 1);
                argv.extend(tokens.into_iter().map(OsString::from));
                argv.extend(tail);
            }
            Err(e) => {
                let _ = writeln!(err, "{}", error_json("validation", &format!("config: {}", e.0)));
                return Parsed::Exit(1);
            }
        }
    }
    match RunConfig::try_parse_from(argv) {
        Ok(cfg) => Parsed::Run(cfg),
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = write!(out, "{}", e.render());
            Parsed::Exit(0)
        }
        Err(e) => {
            let _ = writeln!(err, "{}", error_json("usage", &e.render().to_string()));
            Parsed::Exit(1)
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code: 0 on success, 1 on invalid input, 2 on numerical failure.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cfg = match parse(argv, out, err) {
        Parsed::Run(cfg) => cfg,
        Parsed::Exit(code) => return code,
    };
    let outcome = match commands::dispatch(&cfg) {
        Ok(o) => o,
        Err(f) => return report(err, &f),
    };
    let written = match &cfg.out {
        Some(path) => std::fs::write(path, &outcome.text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => out.write_all(outcome.text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        return report(err, &Failure::Validation(msg));
    }
    match &outcome.failure {
        Some(f) => report(err, f),
        None => 0,
    }
}

fn report(err: &mut dyn Write, failure: &Failure) -> i32 {
    let (kind, msg, code) = match failure {
        Failure::Validation(m) => ("validation", m, 1),
        Failure::Numeric(m) => ("numeric", m, 2),
    };
    let _ = writeln!(err, "{}", error_json(kind, msg));
    code
}

/// [`run_with`] on the process's stdout and stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = run_with(args, &mut stdout.lock(), &mut stderr.lock());
    let _ = std::io::stdout().flush();
    code
}
