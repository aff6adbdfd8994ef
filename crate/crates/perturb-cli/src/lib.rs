//! Experiment harness behind the `perturb` binary.
//!
//! The library surface exists so integration tests can run whole suites in
//! process and inspect rows, summaries, and rendered reports directly.

pub mod config;
pub mod families;
pub mod report;
pub mod suites;

use std::fmt;

use clap::error::ErrorKind;
use clap::Parser;

use config::{CliArgs, Config, Format};
use report::{summarize, Report};
use suites::{run_suite, SuiteOutcome};

/// Exit status used when flags or config entries are unusable.
pub const EXIT_USAGE: i32 = 1;
/// Exit status used when a suite ran but an invariant failed.
pub const EXIT_INVARIANT: i32 = 2;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or config file; maps to exit code 1.
    Usage(String),
    /// A suite failed while computing; maps to exit code 2.
    Run(perturb_core::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Run(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<perturb_core::Error> for CliError {
    fn from(e: perturb_core::Error) -> Self {
        CliError::Run(e)
    }
}

/// A completed run: the outcome plus its rendered report.
pub struct RunOutput {
    pub outcome: SuiteOutcome,
    pub report: Report,
    pub rendered: String,
}

/// Runs the configured suite and renders the report in the configured format.
pub fn run(cfg: &Config) -> Result<RunOutput, CliError> {
    if let Some(n) = cfg.threads {
        perturb_core::parallel::configure_threads(n);
    }
    let outcome = run_suite(cfg)?;
    let summary = summarize(&outcome.rows, cfg.echo());
    let report = Report {
        rows: outcome.rows.clone(),
        summary,
    };
    let rendered = match cfg.format {
        Format::Csv => report::csv_string(&report.rows),
        Format::Json => report::json_string(&report),
    };
    Ok(RunOutput {
        outcome,
        report,
        rendered,
    })
}

/// Full command-line entry point; returns the process exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match CliArgs::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                _ => {
                    eprint!("{e}");
                    EXIT_USAGE
                }
            }
        }
    };
    let cfg = match Config::resolve(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let out = match run(&cfg) {
        Ok(o) => o,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
        Err(CliError::Run(e)) => {
            eprintln!("error: suite did not complete: {e}");
            return EXIT_INVARIANT;
        }
    };

    if let Some(path) = &cfg.out {
        if let Err(e) = std::fs::write(path, out.rendered.as_bytes()) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return EXIT_USAGE;
        }
    } else {
        print!("{}", out.rendered);
    }

    for note in &out.outcome.notes {
        eprintln!("note: {note}");
    }
    eprintln!(
        "{}: {} rows, max ratio {}, median ratio {}",
        cfg.suite, out.report.rows.len(), out.report.summary.max_ratio, out.report.summary.median_ratio
    );

    match out.outcome.expected_failure {
        Some(true) => {
            println!("expected-failure: confirmed");
            0
        }
        Some(false) => {
            eprintln!("error: expected unboundedness did not materialize");
            EXIT_INVARIANT
        }
        None => {
            if out.outcome.passed {
                0
            } else {
                eprintln!("error: suite invariant failed");
                EXIT_INVARIANT
            }
        }
    }
}
