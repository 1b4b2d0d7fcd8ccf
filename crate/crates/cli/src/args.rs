use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "mdregions", version, about = "Multiple-description rate regions and their checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Correlated-noise parameters and the two-description region.
    TwoRegion(TwoArgs),
    /// The three-description region with its corner points.
    ThreeRegion(ThreeArgs),
    /// Corner points with their shared/base codebook rates.
    CornerPoints(ThreeArgs),
    /// Test a rate point against a region.
    Membership(MembershipArgs),
    /// Classify a (D12, D23) grid; CSV on stdout.
    RegimeMap(RegimeArgs),
    /// Monte Carlo check of the test channels and the rate bounds.
    McValidate(McArgs),
    /// Auxiliary-rate constraints of a discrete joint pmf.
    DiscreteEval(DiscreteArgs),
    /// List the constraint families for L descriptions.
    QStar(QStarArgs),
}

fn distortion(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("malformed number {s:?}"))?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} outside (0, 1]"))
    }
}

/// Comma-separated rates, e.g. `1.2,0.8`.
#[derive(Clone, Debug)]
pub struct Rates(pub Vec<f64>);

fn rate_list(s: &str) -> Result<Rates, String> {
    s.split(',')
        .map(|t| {
            let v: f64 = t.trim().parse().map_err(|_| format!("malformed rate {t:?}"))?;
            if v.is_finite() && v >= 0.0 {
                Ok(v)
            } else {
                Err(format!("rate {v} must be finite and nonnegative"))
            }
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Rates)
}

#[derive(Debug, Args)]
pub struct TwoArgs {
    #[arg(long, value_parser = distortion)]
    pub d1: f64,
    #[arg(long, value_parser = distortion)]
    pub d2: f64,
    #[arg(long, value_parser = distortion)]
    pub d12: f64,
    /// One CSV row per constraint instead of JSON.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Args)]
pub struct ThreeArgs {
    #[arg(long, value_parser = distortion)]
    pub d1: f64,
    #[arg(long, value_parser = distortion)]
    pub d2: f64,
    #[arg(long, value_parser = distortion)]
    pub d3: f64,
    #[arg(long, value_parser = distortion)]
    pub d12: f64,
    #[arg(long, value_parser = distortion)]
    pub d23: f64,
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Args)]
pub struct OptionalThree {
    #[arg(long, value_parser = distortion)]
    pub d1: Option<f64>,
    #[arg(long, value_parser = distortion)]
    pub d2: Option<f64>,
    #[arg(long, value_parser = distortion)]
    pub d3: Option<f64>,
    #[arg(long, value_parser = distortion)]
    pub d12: Option<f64>,
    #[arg(long, value_parser = distortion)]
    pub d23: Option<f64>,
}

#[derive(Debug, Args)]
pub struct MembershipArgs {
    /// Region JSON, as written by two-region or three-region.
    #[arg(long, conflicts_with_all = ["d1", "d2", "d3", "d12", "d23"])]
    pub region: Option<PathBuf>,
    #[command(flatten)]
    pub distortions: OptionalThree,
    /// Comma-separated description rates in bits.
    #[arg(long, value_parser = rate_list)]
    pub rates: Rates,
}

#[derive(Debug, Args)]
pub struct RegimeArgs {
    #[arg(long, value_parser = distortion)]
    pub d1: f64,
    #[arg(long, value_parser = distortion)]
    pub d2: f64,
    #[arg(long, value_parser = distortion)]
    pub d3: f64,
    #[arg(long, default_value_t = 50, value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(2..))]
    pub d12_steps: usize,
    #[arg(long, default_value_t = 50, value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(2..))]
    pub d23_steps: usize,
}

#[derive(Debug, Args)]
pub struct McArgs {
    /// Two-description channels instead of three.
    #[arg(long)]
    pub two: bool,
    #[arg(long, value_parser = distortion)]
    pub d1: f64,
    #[arg(long, value_parser = distortion)]
    pub d2: f64,
    #[arg(long, value_parser = distortion, required_unless_present = "two")]
    pub d3: Option<f64>,
    #[arg(long, value_parser = distortion)]
    pub d12: f64,
    /// Defaults to the construction's own D23*.
    #[arg(long, value_parser = distortion)]
    pub d23: Option<f64>,
    #[arg(long, default_value_t = 1_000_000)]
    pub n: usize,
    #[arg(long, default_value_t = mdregions::mc::DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct DiscreteArgs {
    /// Joint pmf document (JSON).
    #[arg(long)]
    pub pmf: PathBuf,
    /// Also decide feasibility of these description rates.
    #[arg(long, value_parser = rate_list)]
    pub rates: Option<Rates>,
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Args)]
pub struct QStarArgs {
    #[arg(long = "l", value_parser = clap::value_parser!(u8).range(2..=5))]
    pub channels: u8,
    #[arg(long)]
    pub csv: bool,
}
