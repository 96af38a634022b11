//! Experiment runner behind the `syncrds` binary.
//!
//! Exit codes: 0 on success, 1 when a run fails (escaped orbit, failed
//! selftest, I/O), 2 when the configuration is rejected. Diagnostics go to
//! stderr as a single `error[<kind>]: <reason>` line.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;
use syncrds::Ensemble;

use commands::{execute, Failure};
use config::{Cli, Command, ExperimentConfig, Format};
use output::config_from_report;

fn into_config(command: Command) -> Result<ExperimentConfig, Failure> {
    Ok(match command {
        Command::Orbit(a) => ExperimentConfig::Orbit(a),
        Command::Lyapunov(a) => ExperimentConfig::Lyapunov(a),
        Command::Survival(a) => ExperimentConfig::Survival(a),
        Command::Pullback(a) => ExperimentConfig::Pullback(a),
        Command::Integrability(a) => ExperimentConfig::Integrability(a),
        Command::ProbeStable(a) => ExperimentConfig::ProbeStable(a),
        Command::ProbeUnstable(a) => ExperimentConfig::ProbeUnstable(a),
        Command::Oracle(a) => ExperimentConfig::Oracle(a),
        Command::Selftest(a) => ExperimentConfig::Selftest(a),
        Command::Replay(r) => {
            let text = std::fs::read_to_string(&r.report)
                .map_err(|e| Failure::Runtime(format!("cannot read {}: {e}", r.report.display())))?;
            config_from_report(&text).map_err(|e| Failure::Config(format!("bad report config: {e}")))?
        }
    })
}

fn report_failure(stderr: &mut dyn Write, f: &Failure) -> i32 {
    let (kind, msg, code) = match f {
        Failure::Config(m) => ("config", m, 2),
        Failure::Runtime(m) => ("runtime", m, 1),
    };
    let _ = writeln!(stderr, "error[{kind}]: {}", msg.replace('\n', " "));
    code
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    0
                }
                _ => {
                    let text = e.render().to_string();
                    let first = text.lines().next().unwrap_or("invalid arguments");
                    let first = first.strip_prefix("error: ").unwrap_or(first);
                    let _ = writeln!(stderr, "error[config]: {first}");
                    2
                }
            };
        }
    };
    let ensemble = match Ensemble::new(cli.workers) {
        Ok(e) => e,
        Err(e) => return report_failure(stderr, &Failure::from(e)),
    };
    let config = match into_config(cli.command) {
        Ok(c) => c,
        Err(f) => return report_failure(stderr, &f),
    };
    let format = cli.format.unwrap_or(match config {
        ExperimentConfig::Oracle(_) => Format::Json,
        _ => Format::Csv,
    });
    let outcome = match execute(config, &ensemble) {
        Ok(o) => o,
        Err(f) => return report_failure(stderr, &f),
    };
    let text = match format {
        Format::Csv => outcome.report.to_csv(),
        Format::Json => outcome.report.to_json(),
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        return report_failure(stderr, &Failure::Runtime(e));
    }
    if outcome.failed {
        let _ = writeln!(stderr, "error[runtime]: selftest reported failing checks");
        return 1;
    }
    0
}
