use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qstrings::resources::SweepAlgo;
use qstrings::Backend;

/// Simulated quantum string matching and comparison with resource accounting.
///
/// Every subcommand is seeded by `--seed` alone. Output is CSV on stdout
/// (or `--csv PATH`), preceded by one `#` comment line echoing the flags.
/// Exit codes: 0 success, 1 verification or crosscheck failure, 2 usage
/// error.
#[derive(Debug, Parser)]
#[command(name = "qstrings", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Find an occurrence of a pattern in a text (doubling-schedule search).
    Match(MatchArgs),
    /// Compare two strings lexicographically.
    Compare(CompareArgs),
    /// Index of the minimum of a list of values.
    MinFind(MinFindArgs),
    /// Scaling sweep over input sizes; one CSV row per grid point.
    Sweep(SweepArgs),
    /// Dense-versus-structured equivalence battery.
    Crosscheck(CrosscheckArgs),
    /// Draw a fingerprint prime and print its universe parameters.
    Primes(PrimesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Dense,
    Structured,
}

impl From<Mode> for Backend {
    fn from(mode: Mode) -> Self {
        match mode {
            Mode::Dense => Backend::Dense,
            Mode::Structured => Backend::Structured,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Master seed; every random choice derives from it.
    #[arg(long)]
    pub seed: u64,
    /// Fingerprint error budget.
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Number of independent trials.
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    /// State backend.
    #[arg(long, value_enum, default_value_t = Mode::Structured)]
    pub mode: Mode,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Dense mode only: write the last measured state of trial 0 as
    /// `basis_index,re,im` lines.
    #[arg(long)]
    pub dump_state: Option<PathBuf>,
    /// Worker threads for trials (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct MatchArgs {
    /// Text as a 0/1 string or a file holding one.
    #[arg(long)]
    pub text: String,
    /// Pattern as a 0/1 string.
    #[arg(long)]
    pub pattern: String,
    /// Treat text and pattern as bytes, expanded most significant bit first.
    #[arg(long)]
    pub ascii: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CompareAlgo {
    Grover,
    Bsearch,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub u: String,
    #[arg(long)]
    pub v: String,
    #[arg(long, value_enum, default_value_t = CompareAlgo::Bsearch)]
    pub algo: CompareAlgo,
    /// Treat u and v as bytes, expanded most significant bit first.
    #[arg(long)]
    pub ascii: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct MinFindArgs {
    /// Comma-separated non-negative integers.
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<u64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// match, compare_grover or compare_bsearch.
    #[arg(long, value_parser = parse_sweep_algo)]
    pub algo: SweepAlgo,
    /// Comma-separated sizes: n for matching, k for comparison.
    #[arg(long, value_delimiter = ',', required = true)]
    pub grid: Vec<usize>,
    /// Pattern length for matching sweeps.
    #[arg(long, default_value_t = 8)]
    pub m: usize,
    #[command(flatten)]
    pub common: Common,
}

fn parse_sweep_algo(s: &str) -> Result<SweepAlgo, String> {
    s.parse().map_err(|e: qstrings::Error| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct CrosscheckArgs {
    /// Instances whose dense state would exceed this many qubits are skipped.
    #[arg(long, default_value_t = 24)]
    pub max_width: usize,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct PrimesArgs {
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Number of string pairs the error budget covers.
    #[arg(long, default_value_t = 1)]
    pub delta: u64,
    /// Longest string length hashed.
    #[arg(long)]
    pub max_len: usize,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}
