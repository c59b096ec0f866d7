//! `padic-rmt`: trajectories, experiment reports and exact Hall-Littlewood tables from the
//! command line.
//!
//! Exit codes: 0 success, 1 bad input, 2 numeric failure or failed criterion, 3 I/O.

mod commands;
mod error;
mod presets;
mod selftest;

use std::path::PathBuf;

use clap::{Args, CommandFactory, Parser, Subcommand};

use error::CliError;
use presets::Preset;

#[derive(Debug, Parser)]
#[command(
    name = "padic-rmt",
    version,
    about = "Products of random p-adic matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Where the ensemble comes from. Exactly one source is used, in the order config, preset,
/// signature.
#[derive(Debug, Args, Clone)]
pub struct SpecArgs {
    /// JSON file with an ensemble spec (or, for experiments, a full experiment config).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Fixed singular numbers, e.g. "1,0".
    #[arg(long, allow_hyphen_values = true)]
    pub signature: Option<String>,
    /// Prime; overrides the one in a config file.
    #[arg(long)]
    pub p: Option<u64>,
}

#[derive(Debug, Args, Clone)]
pub struct SeedArgs {
    /// Master seed; falls back to PADIC_RMT_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args, Clone)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[command(flatten)]
    pub seed: SeedArgs,
    #[arg(long)]
    pub kmax: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    /// Directory for per-trial CSV files and metadata.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also track the interpolating sequences.
    #[arg(long)]
    pub with_interpolation: bool,
}

#[derive(Debug, Args, Clone)]
pub struct ExperimentArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[command(flatten)]
    pub seed: SeedArgs,
    #[arg(long)]
    pub kmax: Option<u64>,
    #[arg(long)]
    pub trials: Option<u64>,
    /// Worker threads; defaults to every core.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the per-trial terminal signatures as CSV here.
    #[arg(long)]
    pub terminals: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct CornerArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub signature: String,
    #[arg(long, default_value_t = 2)]
    pub p: u64,
    /// Which corner: `A^(level)` keeps the last n − level + 1 rows.
    #[arg(long, default_value_t = 2)]
    pub level: usize,
    /// Append an empirical column from this many bi-invariant samples.
    #[arg(long)]
    pub monte_carlo: Option<u64>,
    #[command(flatten)]
    pub seed: SeedArgs,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args, Clone)]
pub struct HlArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub signature: String,
    /// Lower signature for a skew polynomial.
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<String>,
    /// Comma-separated rational points, e.g. "1,1/2,1/4".
    #[arg(long, allow_hyphen_values = true, conflicts_with = "principal")]
    pub points: Option<String>,
    /// Evaluate at x, xt, xt², … instead of explicit points.
    #[arg(long, allow_hyphen_values = true)]
    pub principal: Option<String>,
    /// Parameter t; defaults to 1/p.
    #[arg(long)]
    pub t: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub p: u64,
    /// Evaluate Q instead of P.
    #[arg(long)]
    pub q: bool,
}

#[derive(Debug, Args, Clone)]
pub struct GspArgs {
    /// Balanced singular numbers of the step matrix.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "haar")]
    pub signature: Option<String>,
    /// Use Haar on GSp_{2h}(Z_p) with this h.
    #[arg(long)]
    pub haar: Option<usize>,
    #[arg(long)]
    pub p: Option<u64>,
    #[command(flatten)]
    pub seed: SeedArgs,
    #[arg(long, default_value_t = 1000)]
    pub kmax: u64,
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct SelftestArgs {
    /// Only run checks whose name contains this string (e.g. "hl").
    #[arg(long)]
    pub filter: Option<String>,
    /// Golden corner-gap file to check against instead of the built-in copy.
    #[arg(long)]
    pub golden: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run coupled trajectories and write them as CSV.
    Simulate(SimulateArgs),
    /// Law of large numbers experiment.
    Lln(ExperimentArgs),
    /// Central limit experiment.
    Clt(ExperimentArgs),
    /// Bounded-difference experiment.
    BoundedDiff(ExperimentArgs),
    /// Exact law of a corner's singular numbers.
    CornerDist(CornerArgs),
    /// Evaluate a Hall-Littlewood polynomial exactly.
    HlEval(HlArgs),
    /// Trajectories for symplectic similitude ensembles.
    GspSimulate(GspArgs),
    /// Exact identity checks.
    Selftest(SelftestArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Lln(_) => "lln",
            Command::Clt(_) => "clt",
            Command::BoundedDiff(_) => "bounded-diff",
            Command::CornerDist(_) => "corner-dist",
            Command::HlEval(_) => "hl-eval",
            Command::GspSimulate(_) => "gsp-simulate",
            Command::Selftest(_) => "selftest",
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let name = cli.command.name();
    let result = match cli.command {
        Command::Simulate(a) => commands::simulate(&a),
        Command::Lln(a) => commands::experiment(commands::Experiment::Lln, &a),
        Command::Clt(a) => commands::experiment(commands::Experiment::Clt, &a),
        Command::BoundedDiff(a) => commands::experiment(commands::Experiment::BoundedDiff, &a),
        Command::CornerDist(a) => commands::corner_dist(&a),
        Command::HlEval(a) => commands::hl_eval(&a),
        Command::GspSimulate(a) => commands::gsp_simulate(&a),
        Command::Selftest(a) => selftest::run(&a),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        if let CliError::Usage(_) = e {
            let mut cmd = Cli::command();
            cmd.build();
            if let Some(sub) = cmd.find_subcommand_mut(name) {
                eprintln!("\n{}", sub.render_usage());
            }
        }
        std::process::exit(e.code());
    }
}
