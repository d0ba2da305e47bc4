//! `cumuldyn`: measure, simulate and fit cumulativeness indicators of
//! citation graphs.

mod commands;
mod config;
mod error;
mod input;
mod report;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use cumuldyn::ingest::{BuildFilters, OriginFilter};
use cumuldyn::CountMode;

use crate::error::CliResult;

#[derive(Debug, Parser)]
#[command(name = "cumuldyn", version, about = "Cumulativeness indicators for citation graphs")]
struct Cli {
    /// File of key=value lines supplying flags; command-line flags win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Grow a graph with the search-process model.
    Simulate(SimulateArgs),
    /// Measure id, ipl, mipl and ed of one technology every `stride` nodes.
    Measure(MeasureArgs),
    /// Fit linear growth to a measured series and derive rate predictions.
    Fit(FitArgs),
    /// Goodness of fit of measured distributions against the model laws.
    Gof(GofArgs),
    /// Measure many technologies and compare them.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Growth rate of expected backward links per invention.
    #[arg(long, allow_negative_numbers = true)]
    pub q: f64,
    /// Expected search length of the first invention, `m0 + 1`.
    #[arg(long, allow_negative_numbers = true)]
    pub m1: f64,
    /// Number of nodes.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OriginArg {
    All,
    App,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// Exact integers below the threshold, logarithms above.
    Auto,
    Exact,
    Log,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Nodes CSV: node_id,year,classes[,granted].
    #[arg(long)]
    pub nodes: PathBuf,
    /// Edges CSV: citing_id,cited_id,origin.
    #[arg(long)]
    pub edges: PathBuf,
    /// Keep only nodes with year at or before this.
    #[arg(long)]
    pub year_cutoff: Option<i32>,
    /// Citation origins to keep.
    #[arg(long, value_enum, default_value_t = OriginArg::All)]
    pub origin: OriginArg,
    /// Skip nodes flagged as not granted.
    #[arg(long)]
    pub granted_only: bool,
}

impl CorpusArgs {
    pub fn filters(&self) -> BuildFilters {
        BuildFilters {
            origin: match self.origin {
                OriginArg::All => OriginFilter::All,
                OriginArg::App => OriginFilter::ApplicantOnly,
            },
            granted_only: self.granted_only,
        }
    }
}

#[derive(Debug, Args)]
pub struct CountArgs {
    /// Checkpoint spacing in nodes.
    #[arg(long, default_value_t = 100)]
    pub stride: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    pub mode: ModeArg,
    /// Node count from which `auto` switches to logarithms.
    #[arg(long, default_value_t = cumuldyn::paths::DEFAULT_LOG_THRESHOLD)]
    pub log_threshold: usize,
}

impl CountArgs {
    pub fn count_mode(&self) -> CountMode {
        match self.mode {
            ModeArg::Auto => CountMode::Auto { threshold: self.log_threshold },
            ModeArg::Exact => CountMode::Exact,
            ModeArg::Log => CountMode::Log,
        }
    }
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Class-code prefix selecting the technology; repeat for a union.
    #[arg(long = "prefix", required = true)]
    pub prefixes: Vec<String>,
    /// Technology name recorded in the outputs.
    #[arg(long, default_value = "technology")]
    pub name: String,
    #[command(flatten)]
    pub count: CountArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// series.csv written by `measure`.
    #[arg(long)]
    pub series: PathBuf,
    /// backlinks.csv written by `measure`, enabling the data-based correction.
    #[arg(long)]
    pub backlinks: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GofArgs {
    /// Output directory of `measure`.
    #[arg(long)]
    pub input: PathBuf,
    /// Checkpoint to test; defaults to the last one.
    #[arg(long)]
    pub at: Option<usize>,
    /// n' of the binomial-type law; defaults to the longest path length.
    #[arg(long)]
    pub n_prime: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Grouping table group_name,prefix; one technology per group.
    #[arg(long)]
    pub groups: PathBuf,
    #[command(flatten)]
    pub count: CountArgs,
    #[arg(long)]
    pub out: PathBuf,
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate(args) => commands::simulate::run(&args),
        Command::Measure(args) => commands::measure::run(&args),
        Command::Fit(args) => commands::fit::run(&args),
        Command::Gof(args) => commands::gof::run(&args),
        Command::Sweep(args) => commands::sweep::run(&args),
    }
}

fn main() -> ExitCode {
    let args: Vec<OsString> = std::env::args_os().collect();
    let args = match config::expand(&Cli::command(), args) {
        Ok(args) => args,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let cli = Cli::try_parse_from(args).unwrap_or_else(|e| e.exit());
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
