use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

mod commands;
mod error;
mod input;
mod report;

use error::CliError;
use input::{InputFormat, Weights};
use report::Report;

#[derive(Debug, Parser, Serialize)]
#[command(name = "apportion", version, about = "Divisor and quota apportionment: allocations, sweeps and checks against limit formulas")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Master seed for random tie-breaking and Monte Carlo runs.
    #[arg(long, global = true, env = "APPORTION_SEED", default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Ties::Average)]
    pub ties: Ties,

    /// Absolute tolerance for comparisons against the limit formulas.
    #[arg(long, global = true, default_value_t = 0.01)]
    pub tolerance: f64,

    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub output: Option<PathBuf>,

    /// Cap on worker threads.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub threads: Option<usize>,

    /// Print a table instead of JSON on stdout.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub human: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Ties {
    Random,
    Enumerate,
    Average,
}

#[derive(Debug, Args, Serialize)]
pub struct WeightArgs {
    /// Inline votes, `A=2,B=1` or `2,1`.
    #[arg(long, conflicts_with_all = ["input", "shares"])]
    pub votes: Option<String>,
    /// CSV (`party,votes`) or JSON (`{"A": 2}`) file, `-` for stdin.
    #[arg(long, conflicts_with = "shares")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<InputFormat>,
    /// Share preset `sqrt` / `sqrt:<m>` or explicit shares `0.5,0.3,0.2`.
    #[arg(long)]
    pub shares: Option<String>,
}

impl WeightArgs {
    pub fn load(&self) -> Result<Weights, CliError> {
        match (&self.votes, &self.input, &self.shares) {
            (Some(v), _, _) => input::parse_votes(v),
            (_, Some(path), _) => input::parse_input(path, self.format),
            (_, _, Some(s)) => input::parse_shares(s),
            _ => Err(CliError::Input("give --votes, --input or --shares".into())),
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct RangeArgs {
    #[arg(long, default_value_t = 1)]
    pub seats_from: u64,
    #[arg(long, alias = "seats-max")]
    pub seats_to: u64,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Allocate one house.
    Allocate {
        #[arg(long)]
        method: String,
        #[command(flatten)]
        weights: WeightArgs,
        #[arg(long)]
        seats: u64,
    },
    /// Moments of the seat excess over a range of house sizes.
    Sweep {
        #[arg(long)]
        method: String,
        #[command(flatten)]
        weights: WeightArgs,
        #[command(flatten)]
        range: RangeArgs,
        /// Include the excess histograms.
        #[arg(long)]
        histograms: bool,
    },
    /// Sweep and compare against the limit formulas; exit 3 on mismatch.
    Verify {
        #[arg(long)]
        method: String,
        #[command(flatten)]
        weights: WeightArgs,
        #[command(flatten)]
        range: RangeArgs,
        /// Also compare quota-violation frequencies.
        #[arg(long)]
        violations: bool,
    },
    /// Monte Carlo over uniform random shares, parties ordered by size.
    McSimplex {
        #[arg(long)]
        parties: usize,
        /// Method whose ordered excess is simulated; shares only when absent.
        #[arg(long)]
        method: Option<String>,
        #[arg(long, alias = "house", default_value_t = 100_000)]
        seats: u64,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
    },
    /// Frequency of quota violations.
    Violations {
        #[arg(long)]
        method: String,
        #[command(flatten)]
        weights: WeightArgs,
        #[arg(long)]
        seats_from: Option<u64>,
        #[arg(long, alias = "seats-max")]
        seats_to: Option<u64>,
        /// Number of parties for random uniform shares instead of fixed weights.
        #[arg(long)]
        random_simplex: Option<usize>,
        #[arg(long, alias = "house")]
        seats: Option<u64>,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
    },
    /// Seat gain of two parties pooling their votes.
    Apparentement {
        #[arg(long)]
        method: String,
        #[command(flatten)]
        weights: WeightArgs,
        /// The two parties, by name or 1-based index: `A,B`.
        #[arg(long)]
        pair: String,
        #[command(flatten)]
        range: RangeArgs,
    },
    /// Divergence functionals of an allocation.
    Divergence {
        #[arg(long)]
        method: String,
        #[command(flatten)]
        weights: WeightArgs,
        #[arg(long)]
        seats: u64,
        /// Score this seat vector instead of the method's allocation.
        #[arg(long)]
        seat_vector: Option<String>,
    },
    /// Compare the method's tie orbit with the brute-force argmin of a functional.
    OracleCheck {
        #[arg(long)]
        method: String,
        #[arg(long)]
        functional: String,
        #[command(flatten)]
        weights: WeightArgs,
        #[arg(long)]
        seats: u64,
    },
    /// Period of the seat sequence and the exact average excess over one period.
    Period {
        #[arg(long)]
        method: String,
        #[command(flatten)]
        weights: WeightArgs,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Allocate { .. } => "allocate",
            Command::Sweep { .. } => "sweep",
            Command::Verify { .. } => "verify",
            Command::McSimplex { .. } => "mc-simplex",
            Command::Violations { .. } => "violations",
            Command::Apparentement { .. } => "apparentement",
            Command::Divergence { .. } => "divergence",
            Command::OracleCheck { .. } => "oracle-check",
            Command::Period { .. } => "period",
        }
    }
}

fn emit(text: &str) -> Result<(), CliError> {
    use std::io::Write;
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn write_report(cli: &Cli, report: &Report, table: Option<String>) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(report).expect("report serialises") + "\n";
    match &cli.output {
        Some(path) => std::fs::write(path, &json)?,
        None if !cli.human => emit(&json)?,
        None => {}
    }
    if cli.human {
        let text = table.unwrap_or_else(|| serde_json::to_string_pretty(&report.result).expect("result serialises") + "\n");
        emit(&text)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error[invalid_input]: {e}");
            return ExitCode::from(2);
        }
    }
    let start = Instant::now();
    let outcome = match commands::run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            return ExitCode::from(e.exit_code());
        }
    };
    let status = if outcome.failure.is_none() { "ok" } else { "verification_failed" };
    let config = serde_json::to_value(&cli).expect("config serialises");
    let report = Report::new(cli.command.name(), config, status, outcome.result, start.elapsed().as_secs_f64());
    if let Err(e) = write_report(&cli, &report, outcome.table) {
        eprintln!("error[{}]: {e}", e.code());
        return ExitCode::from(e.exit_code());
    }
    match outcome.failure {
        None => ExitCode::SUCCESS,
        Some(msg) => {
            let e = CliError::Verification(msg);
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(e.exit_code())
        }
    }
}
