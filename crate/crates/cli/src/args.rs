use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use neurovariety::algebra::Prime;
use neurovariety::pnn::Architecture;

#[derive(Debug, Parser)]
#[command(name = "neurovariety", version, about = "Dimensions and filling certificates for polynomial neural networks")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Activation exponent.
    #[arg(long, global = true, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
    pub r: u32,
    /// Modulus for Jacobian ranks.
    #[arg(long, global = true, default_value = "2147483647", value_parser = parse_prime)]
    pub prime: Prime,
    /// Random weight samples per rank estimate.
    #[arg(long, global = true, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    pub trials: u32,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// JSON facts store, read before and written after the command.
    #[arg(long, global = true)]
    pub facts: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dimension of the ambient space.
    Ambient(ArchArg),
    /// Generic Jacobian rank.
    Dim(ArchArg),
    /// Certified upper bound on the dimension.
    Bound(BoundArgs),
    /// Minimal-filling certificate.
    Certify(ArchArg),
    /// Expected dimension, defect and codimension.
    Defect(ArchArg),
    /// Search for minimal filling architectures of one depth.
    Search(SearchArgs),
    /// Recompute a stored table and compare cell by cell.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
pub struct ArchArg {
    /// Hyphen-separated widths, e.g. 2-3-3.
    #[arg(long, value_parser = parse_arch)]
    pub arch: Widths,
}

#[derive(Debug, Clone)]
pub struct Widths(pub Vec<usize>);

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub arch: ArchArg,
    /// Comma-separated cut positions to follow instead of the best split.
    #[arg(long, value_delimiter = ',')]
    pub splits: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Frontier,
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BudgetModeArg {
    Proposals,
    RankComputations,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Uniform,
    FrontierBiased,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Number of weight layers.
    #[arg(long)]
    pub depth: usize,
    #[arg(long, default_value_t = 2)]
    pub d0: usize,
    #[arg(long, default_value_t = 1)]
    pub dl: usize,
    #[arg(long, default_value_t = 1)]
    pub min_width: usize,
    #[arg(long, default_value_t = 5)]
    pub max_width: usize,
    #[arg(long, default_value_t = 1000)]
    pub budget: u64,
    #[arg(long, value_enum, default_value_t = Mode::Frontier)]
    pub mode: Mode,
    #[arg(long, value_enum, default_value_t = BudgetModeArg::Proposals)]
    pub budget_mode: BudgetModeArg,
    #[arg(long, value_enum, default_value_t = PolicyArg::Uniform)]
    pub policy: PolicyArg,
    /// Exhaustive mode: decide every tuple without antichain pruning.
    #[arg(long)]
    pub no_pruning: bool,
    /// Earlier search CSV to resume from.
    #[arg(long)]
    pub warm_start: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// bounds_table, mfa_table_L2_to_L7, depth9_example, or all.
    #[arg(long, default_value = "all")]
    pub table: String,
    /// Deepest census row of the MFA table.
    #[arg(long, default_value_t = 7)]
    pub max_depth: usize,
}

fn parse_prime(s: &str) -> Result<Prime, String> {
    let p: u64 = s.parse().map_err(|e| format!("{e}"))?;
    Prime::new(p).map_err(|e| e.to_string())
}

fn parse_arch(s: &str) -> Result<Widths, String> {
    Architecture::parse(s, 1)
        .map(|a| Widths(a.widths().to_vec()))
        .map_err(|e| e.to_string())
}
