use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "warpmean",
    version,
    about = "Structural-expectation registration of warped curves"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Every subcommand. The resolved value is what a run manifest stores, so
/// all defaults are concrete by the time a command executes.
#[derive(Clone, Debug, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Simulate random warps and a warped (optionally noisy) bundle.
    Simulate(SimulateArgs),
    /// Estimate the structural expectation and its inverse.
    Register(RegisterArgs),
    /// Estimate the warp of one curve with a pointwise band.
    Warp(WarpArgs),
    /// Accumulate absolute variation to make every curve increasing.
    Monotonize(MonotonizeArgs),
    /// Kernel-smooth a bundle with a fixed or selected bandwidth.
    Smooth(SmoothArgs),
    /// Test score homogeneity between groups and rescale scores.
    Rescale(RescaleArgs),
    /// Run Monte Carlo validation experiments.
    Montecarlo(MontecarloArgs),
    /// Re-execute the run recorded in a manifest.
    #[serde(skip)]
    Rerun(RerunArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionArg {
    F,
    G,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriterionArg {
    Registered,
    Pointwise,
}

/// `min,max,count` for a log-spaced bandwidth search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandwidthGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl FromStr for BandwidthGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [min, max, count] = parts.as_slice() else {
            return Err(format!("expected min,max,count, got `{s}`"));
        };
        let num = |x: &str| x.parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
        Ok(BandwidthGrid {
            min: num(min)?,
            max: num(max)?,
            count: count.parse().map_err(|e| format!("`{count}`: {e}"))?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value = "f")]
    pub function: FunctionArg,
    /// Number of curves.
    #[arg(long, default_value_t = 30)]
    pub m: usize,
    /// Number of grid intervals; curves are sampled at j / n, j = 0..=n.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 3000)]
    pub iterations: usize,
    #[arg(long, default_value_t = 0.005)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.0)]
    pub noise_sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the true warps as `curve_id,t,h`.
    #[arg(long)]
    pub warps_out: Option<PathBuf>,
    #[arg(long)]
    pub svg: bool,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct SmoothingArgs {
    /// Fixed bandwidth.
    #[arg(long, conflicts_with = "bandwidth_grid")]
    pub bandwidth: Option<f64>,
    /// Log-spaced search grid `min,max,count`; defaults to one grid gap up
    /// to a quarter of the domain, 20 values.
    #[arg(long)]
    pub bandwidth_grid: Option<BandwidthGrid>,
    #[arg(long, value_enum, default_value = "registered")]
    pub criterion: CriterionArg,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct RegisterArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Structural expectation on the time grid, `x,value`.
    #[arg(long)]
    pub out: PathBuf,
    /// Inverse structural expectation, `x,value`; defaults next to `--out`.
    #[arg(long)]
    pub inverse_out: Option<PathBuf>,
    /// Pointwise band of level `1 - alpha` for the inverse estimate.
    #[arg(long, value_name = "ALPHA")]
    pub band: Option<f64>,
    /// Band CSV `x,center,lower,upper,variance`; defaults next to `--out`.
    #[arg(long)]
    pub band_out: Option<PathBuf>,
    /// Monotonize the curves first (required for non-monotone data).
    #[arg(long)]
    pub monotonize: bool,
    /// Smooth the curves first.
    #[arg(long)]
    pub smooth: bool,
    #[command(flatten)]
    pub smoothing: SmoothingArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub svg: bool,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct WarpArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Zero-based index of the curve whose warp is estimated.
    #[arg(long)]
    pub i0: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long)]
    pub monotonize: bool,
    /// `t,warp,lower,upper`.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub svg: bool,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct MonotonizeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub svg: bool,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct SmoothArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub smoothing: SmoothingArgs,
    /// Per-bandwidth criterion values, `bandwidth,criterion`.
    #[arg(long)]
    pub criteria_out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub svg: bool,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct RescaleArgs {
    /// Scores as `group_id,score`.
    #[arg(long)]
    pub input: PathBuf,
    /// `group_id,raw_score,structural_score,structural_score_int`.
    #[arg(long)]
    pub out: PathBuf,
    /// Pairwise tests; defaults next to `--out`.
    #[arg(long)]
    pub tests_out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub svg: bool,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct MontecarloArgs {
    /// Experiment name, or `all`.
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Replications; each suite has its own default.
    #[arg(long)]
    pub replications: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `experiment,metric,value,threshold,pass`.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub svg: bool,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct RerunArgs {
    pub manifest: PathBuf,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn bandwidth_grid_parses() {
        let g: BandwidthGrid = "0.01, 0.5,12".parse().unwrap();
        assert_eq!(
            g,
            BandwidthGrid {
                min: 0.01,
                max: 0.5,
                count: 12
            }
        );
        assert!("0.1,0.2".parse::<BandwidthGrid>().is_err());
        assert!("a,0.2,3".parse::<BandwidthGrid>().is_err());
    }

    #[test]
    fn commands_round_trip_through_json() {
        let cli = Cli::try_parse_from([
            "warpmean",
            "register",
            "--input",
            "in.csv",
            "--out",
            "o.csv",
            "--smooth",
            "--bandwidth-grid",
            "0.01,0.2,5",
            "--band",
            "0.1",
        ])
        .unwrap();
        let json = serde_json::to_string(&cli.command).unwrap();
        let back: Command = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cli.command);
    }
}
