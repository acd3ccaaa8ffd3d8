//! Command-line front end: zero acquisition, delta sweeps, Johnson fits,
//! zero detection, skewness-kurtosis planes and pair correlation, written
//! as CSV and SVG.

// `!(x >= 0.0)` is used on purpose so NaN fails validation too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
pub mod config;
mod settings;
pub mod svg;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use config::{ConfigError, ConfigFile};
pub use settings::Settings;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const PARAMETER: i32 = 2;
    pub const INCOMPLETE_SCAN: i32 = 3;
    pub const INPUT: i32 = 4;
    pub const UNMATCHED: i32 = 5;
    pub const KS_EXCEEDED: i32 = 6;
}

#[derive(Debug, Parser)]
#[command(
    name = "zdl",
    version,
    about = "Statistics of differences of Riemann zeta zero ordinates"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Plain,
    BaseOffset,
}

/// Flags shared by every subcommand. Each may also be set in the
/// `--config` file; flags win.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// key=value file with default settings
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Zero file(s); zeros are computed locally when absent
    #[arg(long, global = true)]
    pub input: Vec<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,
    /// 1-based index of the first zero to compute
    #[arg(long, global = true)]
    pub start_index: Option<u128>,
    /// Number of zeros to compute, or to keep from each input
    #[arg(long, global = true)]
    pub window: Option<usize>,
    #[arg(long, global = true)]
    pub n_from: Option<usize>,
    #[arg(long, global = true)]
    pub n_to: Option<usize>,
    /// Histogram bins
    #[arg(long, global = true)]
    pub bins: Option<usize>,
    /// Odd moving-average window applied before differentiation
    #[arg(long, global = true)]
    pub smooth: Option<usize>,
    /// Minimum prominence, in standard deviations of the second derivative
    #[arg(long, global = true)]
    pub prominence: Option<f64>,
    /// Matching tolerance in ordinate units
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Output directory [default: $ZDL_OUT_DIR or .]
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute zeros with the Riemann-Siegel formula and write a plain list
    ComputeZeros {
        #[arg(long)]
        count: Option<usize>,
        /// Output file [default: <out-dir>/zeros.txt]
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Moments of delta(n) for each n; writes moments.csv
    Sweep {
        /// Also write per-n histograms to histograms.csv
        #[arg(long)]
        histograms: bool,
    },
    /// Locate zeros from minima of the variance curve's second derivative
    Detect {
        /// Plain list of reference zeros [default: computed]
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Largest tolerated number of unmatched reference zeros
        #[arg(long)]
        max_unmatched: Option<usize>,
    },
    /// Fit Johnson curves to delta(n) distributions; writes fits.csv
    Fit {
        /// Fail when any KS statistic exceeds this
        #[arg(long)]
        ks_max: Option<f64>,
        /// Offsets to draw histogram/fit overlays for
        #[arg(long, value_delimiter = ',')]
        plot_n: Vec<usize>,
        /// Fit a seeded sample of FAMILY:gamma,delta,xi,lambda instead of zeros
        #[arg(long)]
        synthetic: Option<String>,
        /// Size of the synthetic sample
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Skewness-kurtosis plane with the SL boundary
    Plane,
    /// Pair correlation of unfolded zeros against Montgomery's law
    Paircorr {
        #[arg(long)]
        max_x: Option<f64>,
        #[arg(long)]
        bin_width: Option<f64>,
    },
}

/// A failure with the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    pub fn param(message: impl Into<String>) -> Self {
        Self::new(exit::PARAMETER, message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<zdl_core::Error> for CliError {
    fn from(e: zdl_core::Error) -> Self {
        use zdl_core::Error as E;
        let code = match &e {
            E::Parameter(_) | E::OffsetTooLarge { .. } => exit::PARAMETER,
            E::IncompleteScan { .. } => exit::INCOMPLETE_SCAN,
            E::Monotonicity { .. }
            | E::Format { .. }
            | E::Domain(_)
            | E::EmptyInput
            | E::InsufficientPoints { .. }
            | E::InfeasibleMoments { .. }
            | E::DegenerateSample(_) => exit::INPUT,
            E::Io(_) => exit::FAILURE,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::param(e.to_string())
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}

pub fn run(cli: Cli) -> Result<i32, CliError> {
    let settings = Settings::resolve(&cli.common, &cli.command)?;
    if let Some(n) = settings.threads {
        // Only the first call in a process can size the global pool.
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            log::debug!("thread pool already configured: {e}");
        }
    }
    commands::execute(&settings, &cli.command)
}
