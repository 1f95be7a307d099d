//! The `corekit` command line.
//!
//! Exit codes: 0 on success, 2 for usage or input errors, 3 when a result
//! disagrees with the sequential oracle.

mod commands;
pub mod manifest;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::engine::{EngineKind, HeartbeatPolicy, LatencyModel, SimConfig};
use crate::error::CoreError;

pub use manifest::RunManifest;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "corekit", version, about = "Distributed k-core decomposition simulator", args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Sequential decomposition: core table and histogram.
    Decompose(DecomposeArgs),
    /// One distributed run, checked against the sequential result.
    Simulate(SimulateArgs),
    /// Write a synthetic graph.
    Generate(GenerateArgs),
    /// Compare two core tables for the same graph.
    Verify(VerifyArgs),
    /// Repeated runs with duration statistics.
    Bench(BenchArgs),
    /// Print n, m, average and maximum degree, maximum core.
    Stats(StatsArgs),
    /// Repeat the command recorded in a run manifest.
    Rerun(RerunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphFormat {
    /// Adjacency object keyed by vertex id.
    Json,
    /// Comma-separated edge list.
    Csv,
    /// Whitespace-separated edge list.
    Edgelist,
}

impl fmt::Display for GraphFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GraphFormat::Json => "json",
            GraphFormat::Csv => "csv",
            GraphFormat::Edgelist => "edgelist",
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct GraphInput {
    /// Graph file.
    pub input: PathBuf,
    /// Input format; guessed from the extension when absent.
    #[arg(long, value_enum)]
    pub format: Option<GraphFormat>,
}

#[derive(Debug, Clone, Args)]
pub struct SimFlags {
    #[arg(long, default_value_t = EngineKind::Threaded)]
    pub engine: EngineKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub bins: usize,
    /// Heartbeat period: milliseconds (threaded) or ticks (event).
    #[arg(long)]
    pub heartbeat_ms: Option<u64>,
    /// Watchdog quiet period: milliseconds (threaded) or ticks (event).
    #[arg(long)]
    pub watchdog_ms: Option<u64>,
    /// zero, fixed:D or uniform:LO:HI.
    #[arg(long)]
    pub latency: Option<LatencyModel>,
    #[arg(long, value_enum, default_value_t = PolicyArg::OnRecompute)]
    pub heartbeat_policy: PolicyArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    OnRecompute,
    OnDecrease,
}

impl SimFlags {
    pub fn to_config(&self) -> SimConfig {
        let mut config = SimConfig::for_engine(self.engine).with_seed(self.seed).with_bins(self.bins);
        if let Some(h) = self.heartbeat_ms {
            config.heartbeat_period = h;
        }
        if let Some(w) = self.watchdog_ms {
            config.watchdog_quiet_period = w;
        }
        if let Some(l) = self.latency {
            config.latency = l;
        }
        config.heartbeat_policy = match self.heartbeat_policy {
            PolicyArg::OnRecompute => HeartbeatPolicy::OnRecompute,
            PolicyArg::OnDecrease => HeartbeatPolicy::OnDecrease,
        };
        config
    }
}

#[derive(Debug, Clone, Args)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub graph: GraphInput,
    /// Output directory for cores.csv, histogram.csv and manifest.json.
    /// Without it the core table goes to stdout.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub graph: GraphInput,
    #[command(flatten)]
    pub sim: SimFlags,
    #[arg(long, short, default_value = "corekit-run")]
    pub out: PathBuf,
    /// Skip the inline sequential check.
    #[arg(long)]
    pub no_verify: bool,
    /// Precomputed core table to check against instead of recomputing.
    #[arg(long, conflicts_with = "no_verify")]
    pub oracle: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[command(subcommand)]
    pub kind: GenerateKind,
    /// Output file; stdout when absent.
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, global = true, default_value_t = GraphFormat::Json)]
    pub format: GraphFormat,
}

#[derive(Debug, Clone, Subcommand)]
pub enum GenerateKind {
    Rmat {
        n: usize,
        #[arg(default_value_t = 8)]
        edge_factor: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.57)]
        a: f64,
        #[arg(long, default_value_t = 0.19)]
        b: f64,
        #[arg(long, default_value_t = 0.19)]
        c: f64,
        #[arg(long, default_value_t = 0.05)]
        d: f64,
    },
    Cycle {
        n: usize,
    },
    Path {
        n: usize,
    },
    Complete {
        n: usize,
    },
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub graph: GraphInput,
    pub cores_a: PathBuf,
    pub cores_b: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub graph: GraphInput,
    #[command(flatten)]
    pub sim: SimFlags,
    #[arg(long, default_value_t = 20)]
    pub runs: usize,
    /// Run `i` uses seed `seed + i * seed_stride`.
    #[arg(long, default_value_t = 1)]
    pub seed_stride: u64,
    #[arg(long, short, default_value = "corekit-bench")]
    pub out: PathBuf,
    #[arg(long)]
    pub no_verify: bool,
}

#[derive(Debug, Clone, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub graph: GraphInput,
}

#[derive(Debug, Clone, Args)]
pub struct RerunArgs {
    pub manifest: PathBuf,
    /// Where the repeated run writes; defaults to the recorded location.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

/// Failure of a command, mapped to an exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Mismatch(_) => EXIT_MISMATCH,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Mismatch(m) => write!(f, "mismatch: {m}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let argv: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    match commands::execute(cli.command, &argv) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
