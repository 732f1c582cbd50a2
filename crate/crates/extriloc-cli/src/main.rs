use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use extriloc_cli::{export_dot, load_scenario, run_scenario, DotKind, Failure, RunOptions, Suite};

#[derive(Debug, Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Dot {
    ArQuiver,
    SnGraph,
}

/// Runs an extriloc scenario and writes a JSON report.
#[derive(Debug, Parser)]
#[command(name = "extriloc", version)]
struct Args {
    /// Scenario file, or the name of a bundled scenario.
    #[arg(long)]
    scenario: String,
    /// Report destination; the report goes to stdout when omitted.
    #[arg(long)]
    report: Option<String>,
    /// Overrides the shift window of a derived backend.
    #[arg(long)]
    window: Option<i32>,
    #[arg(long)]
    seed: Option<u64>,
    /// Runs only the named suites, in the given order.
    #[arg(long = "suite", value_parser = parse_suite)]
    suites: Vec<Suite>,
    /// Prints a DOT graph instead of running suites (unless --report is set).
    #[arg(long, value_enum)]
    dot: Option<Dot>,
    /// Records wall-clock time in the report.
    #[arg(long)]
    timing: bool,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    Suite::parse(s).ok_or_else(|| {
        let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
        format!("unknown suite {s:?}; expected one of {}", names.join(", "))
    })
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(args: &Args) -> Result<i32, Failure> {
    let mut sc = load_scenario(&args.scenario)?;
    if let Some(w) = args.window {
        sc.set_window(w);
    }
    if let Some(seed) = args.seed {
        sc.seed = seed;
    }
    if let Some(d) = args.dot {
        let what = match d {
            Dot::ArQuiver => DotKind::ArQuiver,
            Dot::SnGraph => DotKind::SnGraph,
        };
        print!("{}", export_dot(&sc, what)?);
        if args.report.is_none() {
            return Ok(0);
        }
    }
    let report = run_scenario(&sc, &RunOptions { suites: args.suites.clone(), timing: args.timing })?;
    let text = report.to_json();
    match &args.report {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Parse(format!("{path}: {e}")))?,
        None => print!("{text}"),
    }
    for r in &report.results {
        if r.status != extriloc_cli::Status::Pass && r.status != extriloc_cli::Status::Skipped {
            eprintln!("{} [{}]: {:?}, {} failures", r.suite, r.subcat, r.status, r.failures.len());
        }
    }
    Ok(report.exit_code())
}
