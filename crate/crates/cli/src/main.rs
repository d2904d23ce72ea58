use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use choquet_cli::commands::{self, Settings, DEFAULT_SAMPLES};
use choquet_cli::{CliError, CliResult};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

/// Choquet integral approximation of partially known quantum states.
///
/// Exit codes: 0 success, 1 unreadable or malformed input, 2 validation
/// failure, 3 mathematically inconsistent data. Set CHOQUET_TOL_PROFILE to
/// `strict` for tighter numerical tolerances.
#[derive(Parser)]
#[command(name = "choquet", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Format {
    /// Print a JSON report.
    #[arg(long, global = true, conflicts_with = "text")]
    json: bool,
    /// Print a human-readable report (the default).
    #[arg(long, global = true)]
    text: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a problem file is well formed and its vectors usable.
    Validate {
        path: PathBuf,
        #[command(flatten)]
        format: Format,
    },
    /// Compute the Choquet operator and derived quantities.
    Approximate {
        path: PathBuf,
        #[command(flatten)]
        format: Format,
    },
    /// Evaluate classical Choquet integrals against the file's capacity.
    Classical {
        path: PathBuf,
        /// Comma-separated function values, e.g. `5,1,3`. Repeatable.
        #[arg(long = "function", short = 'f', value_parser = parse_function, required = true)]
        functions: Vec<Vec<f64>>,
        /// Also print the Mobius transform of the capacity.
        #[arg(long)]
        mobius: bool,
        #[command(flatten)]
        format: Format,
    },
    /// Compare the probability data of two problems sharing reference vectors.
    Compare {
        first: PathBuf,
        second: PathBuf,
        #[command(flatten)]
        format: Format,
    },
    /// Solve for every Hermitian matrix matching the probabilities.
    Family {
        path: PathBuf,
        /// Number of random family members to test for positivity.
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        /// Sampling seed; falls back to the problem's `seed`, then 0.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        format: Format,
    },
}

fn parse_function(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}")))
        .collect()
}

fn emit<T: Serialize>(format: &Format, report: &T, text: impl FnOnce() -> String) -> CliResult<String> {
    if format.json {
        let mut s = serde_json::to_string_pretty(report).map_err(|e| CliError::Parse(e.to_string()))?;
        s.push('\n');
        Ok(s)
    } else {
        Ok(text())
    }
}

fn run(cli: Cli) -> CliResult<String> {
    let settings = Settings::from_env()?;
    match cli.command {
        Command::Validate { path, format } => {
            let r = commands::validate(&path, &settings)?;
            emit(&format, &r, || r.to_text())
        }
        Command::Approximate { path, format } => {
            let a = commands::approximate(&path, &settings)?;
            emit(&format, &a.report, || a.to_text())
        }
        Command::Classical { path, functions, mobius, format } => {
            let r = commands::classical(&path, &functions, mobius, &settings)?;
            emit(&format, &r, || r.to_text())
        }
        Command::Compare { first, second, format } => {
            let r = commands::compare(&first, &second, &settings)?;
            emit(&format, &r, || r.to_text())
        }
        Command::Family { path, samples, seed, format } => {
            let r = commands::family(&path, samples, seed, &settings)?;
            emit(&format, &r, || r.to_text())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            let _ = std::io::stdout().write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
