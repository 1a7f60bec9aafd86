mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "dpdp", version, about = "Dynamic pickup-and-delivery simulator and dispatching experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct Common {
    /// TOML config file; built-in base system values when omitted.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Overrides the configured replication count.
    #[arg(long)]
    replications: Option<usize>,
    /// Overrides the configured seed base.
    #[arg(long)]
    seed_base: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum OutFormat {
    Csv,
    Jsonl,
}

impl OutFormat {
    fn ext(self) -> &'static str {
        match self {
            OutFormat::Csv => "csv",
            OutFormat::Jsonl => "jsonl",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write scenario files, one per seed.
    Generate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a policy on replications (or on one scenario file) and write KPI tables.
    Run {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        policy: PolicyArgs,
        /// Run a single episode on this scenario file.
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Per-epoch trace output; requires --scenario.
        #[arg(long, requires = "scenario")]
        trace: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutFormat,
    },
    /// Grid search over alpha and beta with common random numbers.
    Tune {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        policy: PolicyArgs,
        /// Comma-separated alpha grid.
        #[arg(long, value_delimiter = ',')]
        alphas: Option<Vec<f64>>,
        /// Comma-separated beta grid.
        #[arg(long, value_delimiter = ',')]
        betas: Option<Vec<f64>>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutFormat,
    },
    /// Summaries and delivery-time densities from `run` output directories.
    Report {
        /// Directories written by `run`.
        #[arg(long, required = true, num_args = 1..)]
        input: Vec<PathBuf>,
        /// Histogram bin width in seconds.
        #[arg(long)]
        bin_s: Option<f64>,
        #[arg(long, short)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutFormat,
    },
}

#[derive(Args, Clone)]
pub struct PolicyArgs {
    /// cfa, dsp or liml-<m>; overrides the configured policy.
    #[arg(long)]
    policy: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
}

/// Failure classes, mapped to exit codes 1 and 2.
pub enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Generate { common, out } => commands::generate(&common, &out),
        Command::Run { common, policy, scenario, trace, out, format } => {
            commands::run(&common, &policy, scenario.as_deref(), trace.as_deref(), &out, format)
        }
        Command::Tune { common, policy, alphas, betas, out, format } => {
            commands::tune(&common, &policy, alphas, betas, &out, format)
        }
        Command::Report { input, bin_s, config, out, format } => {
            commands::report(&input, bin_s, config.as_deref(), &out, format)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
