use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use frustration_core::generate::Width;

/// Upper bounds on the number of satisfying assignments of a CNF formula
/// from the mean and variance of the number of violated clauses.
#[derive(Debug, Parser)]
#[command(name = "frustration", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the bound report for a DIMACS file.
    Bounds(BoundsArgs),
    /// Count satisfying assignments by enumeration.
    Count(InputArgs),
    /// Print the exact histogram of violated-clause counts as JSON.
    Dist(InputArgs),
    /// Rewrite a formula into slim form (widths and occurrences in {2, 3}).
    Slim(SlimArgs),
    /// Generate a random k-SAT instance.
    Gen(GenArgs),
    /// Compare every bound with the exact count over a batch of instances.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// DIMACS CNF file, or `-` for standard input.
    pub file: PathBuf,
    /// Machine-readable output.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// DIMACS CNF file, or `-` for standard input.
    pub file: PathBuf,
    /// Enumerate all assignments and add the distribution-based bounds and
    /// the true count.
    #[arg(long)]
    pub exact: bool,
    /// Machine-readable output.
    #[arg(long)]
    pub json: bool,
    /// Compute the moments in floating point; only the basic bound is shown.
    #[arg(long, conflicts_with = "exact")]
    pub float: bool,
    /// Externally estimated v_1 (fraction or decimal); bounds that use it
    /// are reported as conditional.
    #[arg(long, value_name = "P")]
    pub v1: Option<String>,
    /// Externally estimated v_1 + ... + v_M at the medium cutoff.
    #[arg(long = "v-le", value_name = "P")]
    pub v_le: Option<String>,
    /// Digits after the decimal point in the table (values rounded up).
    #[arg(long, default_value_t = 6)]
    pub digits: usize,
}

#[derive(Debug, Args)]
pub struct SlimArgs {
    /// DIMACS CNF file, or `-` for standard input.
    pub file: PathBuf,
    /// Write the slim formula here instead of standard output.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Write the JSON transformation log here instead of standard error.
    #[arg(long)]
    pub log: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub vars: usize,
    #[arg(long)]
    pub clauses: usize,
    /// Clause width `K` or an inclusive range `LO-HI`.
    #[arg(long, default_value = "3")]
    pub width: Width,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write here instead of standard output.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Directory of `.cnf` files, processed in name order.
    #[arg(long, conflicts_with = "ensemble", required_unless_present = "ensemble")]
    pub dir: Option<PathBuf>,
    /// Generate the instances instead; needs --vars and --clauses.
    #[arg(long, requires_all = ["vars", "clauses"])]
    pub ensemble: bool,
    #[arg(long)]
    pub vars: Option<usize>,
    #[arg(long)]
    pub clauses: Option<usize>,
    #[arg(long, default_value = "3")]
    pub width: Width,
    /// Number of ensemble instances; seeds run from --seed-base upwards.
    #[arg(long, default_value_t = 100)]
    pub seeds: u64,
    #[arg(long, default_value_t = 0)]
    pub seed_base: u64,
    /// Write the CSV here instead of standard output.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}
