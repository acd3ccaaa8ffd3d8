//! Resolution of flags, config file, environment and defaults into one
//! validated settings record.

use std::fmt::Display;
use std::path::PathBuf;
use std::str::FromStr;

use zdl_core::zeros::FormatKind;

use crate::config::ConfigFile;
use crate::{CliError, Command, CommonArgs, FormatArg};

pub const DEFAULT_WINDOW: usize = 100_000;
pub const DEFAULT_BINS: usize = 200;
pub const OUT_DIR_ENV: &str = "ZDL_OUT_DIR";

/// Everything a command needs, after precedence and validation.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub inputs: Vec<PathBuf>,
    pub format: FormatKind,
    pub start_index: u128,
    /// Explicit window; `None` means the whole input or the compute default.
    pub window: Option<usize>,
    pub n_from: Option<usize>,
    pub n_to: Option<usize>,
    pub bins: usize,
    pub smooth: usize,
    pub prominence: f64,
    pub tolerance: f64,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub threads: Option<usize>,
    pub count: Option<usize>,
    pub reference: Option<PathBuf>,
    pub max_unmatched: usize,
    pub ks_max: Option<f64>,
    pub max_x: f64,
    pub bin_width: f64,
}

fn pick<T: FromStr>(flag: Option<T>, file: &ConfigFile, key: &str) -> Result<Option<T>, CliError>
where
    T::Err: Display,
{
    match flag {
        Some(v) => Ok(Some(v)),
        None => Ok(file.get(key)?),
    }
}

fn positive<T: PartialOrd + Default + Display>(
    name: &str,
    v: Option<T>,
) -> Result<Option<T>, CliError> {
    match v {
        Some(x) if x <= T::default() => {
            Err(CliError::param(format!("{name} must be positive, got {x}")))
        }
        other => Ok(other),
    }
}

impl Settings {
    pub fn resolve(args: &CommonArgs, command: &Command) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::param(format!("cannot read config {}: {e}", path.display()))
                })?;
                ConfigFile::parse(&text)?
            }
            None => ConfigFile::default(),
        };

        let inputs = if !args.input.is_empty() {
            args.input.clone()
        } else {
            file.raw("input")
                .map(|v| vec![PathBuf::from(v)])
                .unwrap_or_default()
        };
        let format = match args.format {
            Some(f) => f,
            None => match file.raw("format") {
                None | Some("plain") => FormatArg::Plain,
                Some("base-offset") => FormatArg::BaseOffset,
                Some(other) => return Err(CliError::param(format!("unknown format {other:?}"))),
            },
        };
        let format = match format {
            FormatArg::Plain => FormatKind::PlainList,
            FormatArg::BaseOffset => FormatKind::BaseOffset,
        };
        let out_dir = args
            .out_dir
            .clone()
            .or_else(|| file.raw("out-dir").map(PathBuf::from))
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));

        let (mut count, mut reference, mut max_unmatched, mut ks_max, mut max_x, mut bin_width) =
            (None, None, None, None, None, None);
        match command {
            Command::ComputeZeros { count: c, .. } => count = *c,
            Command::Detect {
                reference: r,
                max_unmatched: m,
            } => {
                reference = r.clone();
                max_unmatched = *m;
            }
            Command::Fit { ks_max: k, .. } => ks_max = *k,
            Command::Paircorr {
                max_x: x,
                bin_width: w,
            } => {
                max_x = *x;
                bin_width = *w;
            }
            Command::Sweep { .. } | Command::Plane => {}
        }

        let settings = Settings {
            inputs,
            format,
            start_index: positive("start-index", pick(args.start_index, &file, "start-index")?)?
                .unwrap_or(1),
            window: positive("window", pick(args.window, &file, "window")?)?,
            n_from: positive("n-from", pick(args.n_from, &file, "n-from")?)?,
            n_to: positive("n-to", pick(args.n_to, &file, "n-to")?)?,
            bins: pick(args.bins, &file, "bins")?.unwrap_or(DEFAULT_BINS),
            smooth: pick(args.smooth, &file, "smooth")?
                .unwrap_or(zdl_core::stats::DEFAULT_SMOOTHING_WINDOW),
            prominence: pick(args.prominence, &file, "prominence")?
                .unwrap_or(zdl_core::stats::DEFAULT_PROMINENCE_SD),
            tolerance: positive("tolerance", pick(args.tolerance, &file, "tolerance")?)?
                .unwrap_or(zdl_core::stats::DEFAULT_TOLERANCE),
            out_dir,
            seed: pick(args.seed, &file, "seed")?.unwrap_or(0),
            threads: positive("threads", pick(args.threads, &file, "threads")?)?,
            count: positive("count", pick(count, &file, "count")?)?,
            reference: reference.or_else(|| file.raw("reference").map(PathBuf::from)),
            max_unmatched: pick(max_unmatched, &file, "max-unmatched")?.unwrap_or(0),
            ks_max: pick(ks_max, &file, "ks-max")?,
            max_x: positive("max-x", pick(max_x, &file, "max-x")?)?.unwrap_or(3.0),
            bin_width: positive("bin-width", pick(bin_width, &file, "bin-width")?)?.unwrap_or(0.05),
        };
        settings.validate()?;
        Ok(settings)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.bins < 10 {
            return Err(CliError::param(format!(
                "bins must be at least 10, got {}",
                self.bins
            )));
        }
        if self.smooth == 0 || self.smooth % 2 == 0 {
            return Err(CliError::param(format!(
                "smooth must be odd, got {}",
                self.smooth
            )));
        }
        if !(self.prominence >= 0.0 && self.prominence.is_finite()) {
            return Err(CliError::param(format!(
                "prominence must be non-negative, got {}",
                self.prominence
            )));
        }
        if let Some(k) = self.ks_max {
            if !(k >= 0.0) {
                return Err(CliError::param(format!(
                    "ks-max must be non-negative, got {k}"
                )));
            }
        }
        if let (Some(a), Some(b)) = (self.n_from, self.n_to) {
            if a > b {
                return Err(CliError::param(format!("n-from {a} exceeds n-to {b}")));
            }
        }
        if let (Some(b), Some(w)) = (self.n_to, self.window) {
            if b >= w {
                return Err(CliError::param(format!(
                    "n-to {b} must be below window {w}"
                )));
            }
        }
        Ok(())
    }

    /// `[n_from, n_to]` with defaults, clamped so `n_to < len`.
    pub fn offset_range(
        &self,
        default: (usize, usize),
        len: usize,
    ) -> Result<(usize, usize), CliError> {
        let n_from = self.n_from.unwrap_or(default.0);
        let n_to = match self.n_to {
            Some(n) => n,
            None => default.1.min(len.saturating_sub(1)),
        };
        if n_to >= len {
            return Err(CliError::param(format!(
                "n-to {n_to} must be below the {len} zeros available"
            )));
        }
        if n_from == 0 || n_from > n_to {
            return Err(CliError::param(format!(
                "empty offset range {n_from}..={n_to}"
            )));
        }
        Ok((n_from, n_to))
    }
}
