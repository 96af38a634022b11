//! Command-line surface and the serializable experiment configuration.
//!
//! Each subcommand's argument struct doubles as its echoed configuration, so a
//! report's `config` field can be fed back through `replay`.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use syncrds::Family;

#[derive(Debug, Parser)]
#[command(name = "syncrds", version, about = "Random dynamical systems experiments")]
pub struct Cli {
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,

    /// Defaults to JSON for `oracle` and CSV otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One forward (or pullback) trajectory.
    Orbit(OrbitArgs),
    /// Finite-time Lyapunov exponents over independent paths.
    Lyapunov(LyapunovArgs),
    /// Empirical P(|Z_n| < 1) for family G against the k/(k+n) bound.
    Survival(SurvivalArgs),
    /// Family-F pullback diameters of [-R, R] (synchronization curve).
    Pullback(PullbackArgs),
    /// Log-moment of the one-step C^1 norm over [-1, 1].
    Integrability(IntegrabilityArgs),
    /// Stable-set probe |phi_n(y) - phi_n(x)| <= beta e^{mu n}.
    ProbeStable(ProbeStableArgs),
    /// Unstable-set probe along backward orbits.
    ProbeUnstable(ProbeUnstableArgs),
    /// Closed-form reference values.
    Oracle(OracleArgs),
    /// Fast invariant suite; exits nonzero on any violation.
    Selftest(SelftestArgs),
    /// Re-run the configuration echoed in a previous JSON or CSV report.
    Replay(ReplayArgs),
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse::<Family>().map_err(|e| e.to_string())
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct OrbitArgs {
    #[arg(long, value_parser = parse_family, default_value = "G")]
    pub family: Family,
    #[arg(long, allow_negative_numbers = true)]
    pub z0: f64,
    #[arg(long)]
    pub steps: usize,
    /// Use the pullback path theta_{-n} omega instead of omega.
    #[arg(long)]
    #[serde(default)]
    pub pullback: bool,
    #[arg(long, env = "SYNCRDS_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct LyapunovArgs {
    #[arg(long, value_parser = parse_family, default_value = "G")]
    pub family: Family,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub z0: f64,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    /// Number of independent paths.
    #[arg(long, default_value_t = 100)]
    pub seeds: u64,
    #[arg(long, env = "SYNCRDS_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SurvivalArgs {
    #[arg(long, default_value_t = 4)]
    pub k: u64,
    /// Defaults to 2^-(k-1).
    #[arg(long, allow_negative_numbers = true)]
    pub z0: Option<f64>,
    /// Comma-separated checkpoints.
    #[arg(long = "n", value_delimiter = ',', default_values_t = [10usize, 100, 1000, 10000])]
    pub checkpoints: Vec<usize>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, env = "SYNCRDS_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct PullbackArgs {
    #[arg(long, default_value_t = 10.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub epsilon: f64,
    #[arg(long = "n", value_delimiter = ',', default_values_t = [10usize, 100, 1000])]
    pub checkpoints: Vec<usize>,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, env = "SYNCRDS_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Seed of the dual family-G forward curve (defaults to seed + 1).
    #[arg(long)]
    pub dual_seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct IntegrabilityArgs {
    #[arg(long, value_parser = parse_family, default_value = "G")]
    pub family: Family,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long = "K0", alias = "k0", default_value_t = 20)]
    #[serde(rename = "K0")]
    pub k0: u64,
    #[arg(long, env = "SYNCRDS_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ProbeStableArgs {
    #[arg(long, value_parser = parse_family, default_value = "G")]
    pub family: Family,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub x: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub y: f64,
    /// Contraction rate, must be negative.
    #[arg(long, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    #[arg(long = "n", value_delimiter = ',', default_values_t = [10usize, 100, 1000, 10000])]
    pub checkpoints: Vec<usize>,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, env = "SYNCRDS_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ProbeUnstableArgs {
    #[arg(long, value_parser = parse_family, default_value = "F")]
    pub family: Family,
    #[arg(long, allow_negative_numbers = true)]
    pub x0: f64,
    /// Expansion rate, must be positive.
    #[arg(long)]
    pub mu: f64,
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    #[arg(long = "n", value_delimiter = ',', default_values_t = [10usize, 100, 1000])]
    pub checkpoints: Vec<usize>,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, env = "SYNCRDS_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleName {
    SurvivalBound,
    ExactExponent,
    TruncatedLogMoment,
    TailProbability,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct OracleArgs {
    #[arg(value_enum)]
    pub name: OracleName,
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long)]
    pub n: Option<u64>,
    /// Omit for the untruncated (divergent) moment.
    #[arg(long = "K0", alias = "k0")]
    #[serde(rename = "K0")]
    pub k0: Option<u64>,
    #[arg(long, value_parser = parse_family)]
    pub family: Option<Family>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SelftestArgs {
    #[arg(long, env = "SYNCRDS_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct ReplayArgs {
    /// A JSON report (or bare config) or a CSV report with a `# config=` line.
    pub report: PathBuf,
}

/// Echoed configuration of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum ExperimentConfig {
    Orbit(OrbitArgs),
    Lyapunov(LyapunovArgs),
    Survival(SurvivalArgs),
    Pullback(PullbackArgs),
    Integrability(IntegrabilityArgs),
    ProbeStable(ProbeStableArgs),
    ProbeUnstable(ProbeUnstableArgs),
    Oracle(OracleArgs),
    Selftest(SelftestArgs),
}

impl ExperimentConfig {
    pub fn seed(&self) -> Option<u64> {
        match self {
            ExperimentConfig::Orbit(a) => Some(a.seed),
            ExperimentConfig::Lyapunov(a) => Some(a.seed),
            ExperimentConfig::Survival(a) => Some(a.seed),
            ExperimentConfig::Pullback(a) => Some(a.seed),
            ExperimentConfig::Integrability(a) => Some(a.seed),
            ExperimentConfig::ProbeStable(a) => Some(a.seed),
            ExperimentConfig::ProbeUnstable(a) => Some(a.seed),
            ExperimentConfig::Oracle(_) => None,
            ExperimentConfig::Selftest(a) => Some(a.seed),
        }
    }
}
