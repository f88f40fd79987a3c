use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use oneobs::RuleKind;

use crate::grid::GridSpec;

const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Parser)]
#[command(name = "oneobs", version, about = "Confidence intervals from a single observation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the constant c of a rule at confidence 1 - alpha.
    Calibrate(CalibrateArgs),
    /// Exact coverage of a rule along a grid of standardized means.
    Curve(CurveArgs),
    /// Simulate coverage at one parameter point and check it.
    Verify(VerifyArgs),
    /// Simulate coverage along a grid and locate the worst case.
    Scan(ScanArgs),
    /// Run the closed-form consistency checks.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Family: `normal`, `cauchy` or `table:<path>` (CSV with header `z,f0`).
#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    #[arg(long, default_value = "normal")]
    pub family: String,
}

#[derive(Debug, Clone, Args)]
pub struct RuleArgs {
    /// mean-ar, mean-stein, sigma-normal, sigma-general, sigma-compact or mean-multivariate.
    #[arg(long, value_parser = parse_kind)]
    pub kind: RuleKind,
    /// Target miscoverage; the rule is calibrated to confidence 1 - alpha.
    #[arg(long, conflicts_with = "c")]
    pub alpha: Option<f64>,
    /// Use this constant instead of calibrating (univariate rules only).
    #[arg(long)]
    pub c: Option<f64>,
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Lower bound on |X| for sigma-compact.
    #[arg(long)]
    pub a: Option<f64>,
    /// Upper bound on |X| for sigma-compact.
    #[arg(long)]
    pub b: Option<f64>,
    /// Dimension for mean-multivariate.
    #[arg(long)]
    pub p: Option<usize>,
    /// Number of draws for mean-multivariate.
    #[arg(long)]
    pub m: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct McArgs {
    #[arg(long, default_value_t = 1_000_000)]
    pub reps: u64,
    #[arg(long, env = "ONEOBS_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Number of independently seeded replicate batches.
    #[arg(long, default_value_t = oneobs::montecarlo::DEFAULT_PARTITIONS)]
    pub partitions: u32,
    /// Report wall_time as 0 so repeated runs are byte-identical.
    #[arg(long)]
    pub omit_timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CalibrateArgs {
    /// A rule kind, or `joint` for the Bonferroni mean and sigma pair.
    #[arg(long)]
    pub kind: String,
    #[arg(long)]
    pub alpha: f64,
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    /// Share of alpha given to the mean interval in `joint`.
    #[arg(long, default_value_t = 0.5)]
    pub split: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub rule: RuleArgs,
    /// Standardized means as start:stop:step (both ends included).
    #[arg(long)]
    pub grid: GridSpec,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CompactLaw {
    /// Atoms at ±a and ±b with probabilities from --probs.
    FourPoint,
    /// |X| uniform on [a, b] with a random sign.
    Uniform,
}

#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    /// Location for univariate rules.
    #[arg(long, conflicts_with = "lambda")]
    pub mu: Option<f64>,
    /// Scale for univariate rules; for mean-multivariate a covariance:
    /// identity, spread, rotated, scaled:<s> or diag:<d1,d2,...>.
    #[arg(long)]
    pub sigma: Option<String>,
    /// Standardized mean mu/sigma for univariate rules.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Law for sigma-compact.
    #[arg(long, value_enum, default_value_t = CompactLaw::Uniform)]
    pub dist: CompactLaw,
    /// Probabilities of a, -a, b, -b for --dist four-point.
    #[arg(long, value_delimiter = ',')]
    pub probs: Option<Vec<f64>>,
    /// Length of the mean vector (placed on the first axis) for mean-multivariate.
    #[arg(long)]
    pub nu_norm: Option<f64>,
    /// Seed for `--sigma rotated`.
    #[arg(long, default_value_t = 1)]
    pub rotation_seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub rule: RuleArgs,
    #[command(flatten)]
    pub point: PointArgs,
    #[command(flatten)]
    pub mc: McArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub rule: RuleArgs,
    #[command(flatten)]
    pub point: PointArgs,
    /// Standardized means, or mean-vector lengths for mean-multivariate.
    #[arg(long)]
    pub grid: GridSpec,
    #[command(flatten)]
    pub mc: McArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SelftestArgs {
    /// Also check a tabulated family against the normal closed form.
    #[arg(long)]
    pub family: Option<String>,
    #[command(flatten)]
    pub out: OutputArgs,
}

fn parse_kind(s: &str) -> Result<RuleKind, String> {
    s.parse().map_err(|e: oneobs::Error| e.to_string())
}
