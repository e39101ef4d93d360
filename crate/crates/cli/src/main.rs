use std::io::Write;
use std::process::ExitCode;

use kenmotsu::{run, PRECISION_VAR};

fn main() -> ExitCode {
    let precision = std::env::var(PRECISION_VAR).ok();
    let outcome = run(std::env::args_os(), precision.as_deref());
    let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    ExitCode::from(outcome.code as u8)
}
