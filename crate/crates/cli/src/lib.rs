//! Command-line driver for the `kee` tool.

pub mod args;
pub mod commands;
pub mod report;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};

pub use args::{parse, Command, OutputFormat, RunConfig, UsageError, UsageKind};
pub use commands::{run, Outcome};
pub use report::{fmt_g17, Record, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_THRESHOLD: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Serializes an outcome in the configured format.
pub fn render(cfg: &RunConfig, outcome: &Outcome) -> io::Result<Vec<u8>> {
    match cfg.format {
        OutputFormat::Json => Ok(report::to_json(&outcome.meta, &outcome.rows).into_bytes()),
        OutputFormat::Csv => report::to_csv(&commands::ECHO_KEYS, &outcome.rows),
    }
}

/// Writes the rendered report to `cfg.output` or `stdout`; returns bytes written.
pub fn emit(cfg: &RunConfig, outcome: &Outcome, stdout: &mut dyn Write) -> io::Result<usize> {
    let bytes = render(cfg, outcome)?;
    match &cfg.output {
        Some(path) => report::write_bytes(&mut File::create(path)?, &bytes),
        None => report::write_bytes(stdout, &bytes),
    }
}

/// `KEE_THREADS` as a positive integer, if set.
pub fn threads_from_env() -> Result<Option<usize>, UsageError> {
    match std::env::var("KEE_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(k) if k > 0 => Ok(Some(k)),
            _ => Err(UsageError {
                kind: UsageKind::Invalid,
                message: format!("KEE_THREADS must be a positive integer, got {v:?}"),
            }),
        },
    }
}

/// Parse, run and emit; returns the process exit status.
pub fn execute<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match parse(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = match e.kind {
                UsageKind::Info => write!(stdout, "{e}"),
                UsageKind::Invalid => writeln!(stderr, "{}", e.message.trim_end()),
            };
            return e.exit_code();
        }
    };
    let outcome = run(&cfg);
    if let Err(e) = emit(&cfg, &outcome, stdout) {
        let _ = writeln!(stderr, "kee: cannot write report: {e}");
        return EXIT_IO;
    }
    if outcome.failed {
        EXIT_THRESHOLD
    } else {
        EXIT_OK
    }
}
