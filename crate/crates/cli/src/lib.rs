//! Command-line front end: runs sweeps, writes plot-ready CSV and JSON
//! reports.

pub mod commands;
pub mod output;

use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use commands::{run, Outcome};

/// Environment variable selecting the worker count when `--threads` is absent.
pub const THREADS_ENV: &str = "ENTANGLE_NUM_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] entangle_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Config(String),
    #[error("check failed: {0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Io { .. } => "Io",
            CliError::Config(_) => "InvalidConfig",
            CliError::CheckFailed(_) => "CheckFailed",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::CheckFailed(_) => 3,
            _ => 1,
        }
    }
}

#[derive(Parser, Debug, Clone)]
#[command(
    name = "entangle",
    version,
    about = "Entanglement entropy of lattice scalar fields"
)]
pub struct Cli {
    /// Worker threads; defaults to $ENTANGLE_NUM_THREADS, then to all cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Directory receiving the output files.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Ball in flat space: radial sweep, area-law fit.
    FlatSphere(FlatSphereArgs),
    /// Ball in the Einstein static universe: sweep, fit and mirror-symmetry report.
    Einstein(EinsteinArgs),
    /// Voxel regions on a cubic array.
    Cubic(CubicArgs),
    /// Entropy of a fixed region as the outer wall approaches.
    #[command(subcommand)]
    Proximity(ProximityCommand),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct NumericArgs {
    /// Relative Frobenius tolerance on Ω·Ω − K.
    #[arg(long, default_value_t = 1e-10)]
    pub tol_sqrt: f64,
    /// Band outside [0, 1) in which mode eigenvalues are clamped.
    #[arg(long, default_value_t = 1e-10)]
    pub tol_clamp: f64,
}

impl NumericArgs {
    pub fn tolerances(&self) -> Result<entangle_core::Tolerances, CliError> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.tol_sqrt) || !ok(self.tol_clamp) {
            return Err(CliError::Config("tolerances must be positive".into()));
        }
        Ok(entangle_core::Tolerances {
            sqrt_residual: self.tol_sqrt,
            clamp: self.tol_clamp,
        })
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct LSumArgs {
    /// Fixed multipole cutoff for every boundary.
    #[arg(long)]
    pub l_cut: Option<usize>,
    /// Cutoff rule: l_cut = round(l_base + l_per_radius · areal radius).
    #[arg(long, default_value_t = 50.0)]
    pub l_base: f64,
    #[arg(long, default_value_t = 10.0)]
    pub l_per_radius: f64,
    /// Top fraction of multipoles used for the tail fit.
    #[arg(long, default_value_t = 0.4)]
    pub tail_window: f64,
}

impl LSumArgs {
    pub fn policy(&self) -> entangle_core::radial::LSumPolicy {
        entangle_core::radial::LSumPolicy {
            l_base: self.l_base,
            l_per_radius: self.l_per_radius,
            tail_window: self.tail_window,
            l_cut: self.l_cut,
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct FlatSphereArgs {
    /// Number of radial sites N.
    #[arg(long, default_value_t = 60)]
    pub n_sites: usize,
    /// Boundary indices n as `first:last`.
    #[arg(long, default_value = "10:50")]
    pub radii: IndexRange,
    /// Boundary indices entering the fit; defaults to 10:N-10.
    #[arg(long)]
    pub fit_window: Option<IndexRange>,
    #[command(flatten)]
    pub lsum: LSumArgs,
    #[command(flatten)]
    pub numeric: NumericArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EinsteinArgs {
    #[arg(long, default_value_t = 99)]
    pub n_sites: usize,
    /// Boundary indices; defaults to every boundary 1:N-1.
    #[arg(long)]
    pub radii: Option<IndexRange>,
    /// Smallest A/(4a²) entering the fit.
    #[arg(long, default_value_t = 0.0)]
    pub fit_min_area: f64,
    #[command(flatten)]
    pub lsum: LSumArgs,
    #[command(flatten)]
    pub numeric: NumericArgs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WallArg {
    Exclude,
    Include,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CubicArgs {
    /// Lattice extent as `x,y,z`.
    #[arg(long, default_value = "12,12,12")]
    pub dims: Dims,
    /// `box:a:b` sweeps centred cubes of edge a..=b; `sphere:a:b` sweeps
    /// voxel balls of radius a..=b about the lattice centre.
    #[arg(long, conflicts_with = "region_file")]
    pub region: Option<RegionArg>,
    /// Single region in the run-length text format.
    #[arg(long)]
    pub region_file: Option<PathBuf>,
    /// Also evaluate every complement and require equal entropies.
    #[arg(long)]
    pub complement: bool,
    /// Whether faces against the array boundary count towards the area.
    #[arg(long, value_enum, default_value_t = WallArg::Exclude)]
    pub walls: WallArg,
    #[arg(long, default_value_t = entangle_core::cubic::DEFAULT_MAX_SITES)]
    pub max_sites: usize,
    #[command(flatten)]
    pub numeric: NumericArgs,
}

#[derive(Subcommand, Debug, Clone)]
pub enum ProximityCommand {
    /// Flat ball of fixed size in chains of decreasing length.
    Radial(RadialProximityArgs),
    /// Cube of fixed edge moved towards one wall of the array.
    Cubic(CubicProximityArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RadialProximityArgs {
    /// Boundary index of the ball.
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    /// Chain lengths N, in order, as `first:last`.
    #[arg(long, default_value = "60:20")]
    pub n_sites: IndexRange,
    #[command(flatten)]
    pub lsum: LSumArgs,
    #[command(flatten)]
    pub numeric: NumericArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CubicProximityArgs {
    #[arg(long, default_value = "8,8,8")]
    pub dims: Dims,
    #[arg(long, default_value_t = 2)]
    pub edge: usize,
    /// Number of sites left between cube and wall, in order.
    #[arg(long, default_value = "3:0")]
    pub gaps: IndexRange,
    #[arg(long, default_value_t = entangle_core::cubic::DEFAULT_MAX_SITES)]
    pub max_sites: usize,
    #[command(flatten)]
    pub numeric: NumericArgs,
}

/// Inclusive `first:last`; descending when `first > last`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndexRange {
    pub first: usize,
    pub last: usize,
}

impl IndexRange {
    pub fn values(&self) -> Vec<usize> {
        if self.first <= self.last {
            (self.first..=self.last).collect()
        } else {
            (self.last..=self.first).rev().collect()
        }
    }

    pub fn sorted(&self) -> RangeInclusive<usize> {
        self.first.min(self.last)..=self.first.max(self.last)
    }
}

impl FromStr for IndexRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| format!("expected `first:last`, got `{s}`"))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<usize>()
                .map_err(|e| format!("bad index `{v}`: {e}"))
        };
        Ok(Self {
            first: parse(a)?,
            last: parse(b)?,
        })
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Dims(pub [usize; 3]);

impl FromStr for Dims {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let v: Vec<usize> = s
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|e| format!("bad dimensions `{s}`: {e}"))?;
        let d: [usize; 3] = v
            .try_into()
            .map_err(|_| format!("expected `x,y,z`, got `{s}`"))?;
        Ok(Dims(d))
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum RegionArg {
    Box { first: usize, last: usize },
    Sphere { first: usize, last: usize },
}

impl FromStr for RegionArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (shape, range) = s
            .split_once(':')
            .ok_or_else(|| format!("expected `box:a:b` or `sphere:a:b`, got `{s}`"))?;
        let r: IndexRange = range.parse()?;
        match shape {
            "box" => Ok(RegionArg::Box {
                first: r.first,
                last: r.last,
            }),
            "sphere" => Ok(RegionArg::Sphere {
                first: r.first,
                last: r.last,
            }),
            other => Err(format!("unknown region shape `{other}`")),
        }
    }
}

/// Worker count: explicit flag, then the environment, then all cores.
pub fn resolve_threads(flag: Option<usize>, env: Option<&str>) -> Result<usize, CliError> {
    if let Some(n) = flag {
        return positive_threads(n);
    }
    if let Some(v) = env.map(str::trim).filter(|v| !v.is_empty()) {
        let n = v.parse::<usize>().map_err(|_| {
            CliError::Config(format!("{THREADS_ENV}={v} is not a positive integer"))
        })?;
        return positive_threads(n);
    }
    Ok(std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn positive_threads(n: usize) -> Result<usize, CliError> {
    if n == 0 {
        return Err(CliError::Config("thread count must be at least 1".into()));
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        let r: IndexRange = "3:6".parse().unwrap();
        assert_eq!(r.values(), vec![3, 4, 5, 6]);
        let r: IndexRange = "6:3".parse().unwrap();
        assert_eq!(r.values(), vec![6, 5, 4, 3]);
        assert!("3".parse::<IndexRange>().is_err());
        assert!("a:3".parse::<IndexRange>().is_err());
    }

    #[test]
    fn dims_and_regions() {
        assert_eq!("12,12,14".parse::<Dims>().unwrap(), Dims([12, 12, 14]));
        assert!("12,12".parse::<Dims>().is_err());
        assert_eq!(
            "box:2:8".parse::<RegionArg>().unwrap(),
            RegionArg::Box { first: 2, last: 8 }
        );
        assert!("cone:1:2".parse::<RegionArg>().is_err());
    }

    #[test]
    fn thread_precedence() {
        assert_eq!(resolve_threads(Some(3), Some("5")).unwrap(), 3);
        assert_eq!(resolve_threads(None, Some("5")).unwrap(), 5);
        assert!(resolve_threads(None, None).unwrap() >= 1);
        assert!(resolve_threads(None, Some("zero")).is_err());
        assert!(resolve_threads(Some(0), None).is_err());
    }

    #[test]
    fn parses_command_lines() {
        let cli = Cli::try_parse_from([
            "entangle",
            "flat-sphere",
            "--n-sites",
            "60",
            "--radii",
            "10:50",
        ])
        .unwrap();
        assert!(matches!(cli.command, Command::FlatSphere(ref a) if a.n_sites == 60));
        let cli =
            Cli::try_parse_from(["entangle", "--threads", "2", "proximity", "cubic"]).unwrap();
        assert_eq!(cli.threads, Some(2));
        assert!(Cli::try_parse_from([
            "entangle",
            "cubic",
            "--region",
            "box:2:3",
            "--region-file",
            "x.rle"
        ])
        .is_err());
    }
}
