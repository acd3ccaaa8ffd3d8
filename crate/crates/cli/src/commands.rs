use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;

use zdl_core::analysis::{
    detect_zeros_end_to_end, empirical_pair_correlation, montgomery_r2, offsets_spanning,
    pair_correlation_mae, plane_report, unfold, DetectionOptions,
};
use zdl_core::delta::{compute_deltas, sweep, sweep_distributions, Histogram};
use zdl_core::johnson::{fit, write_fits_csv, Family, JohnsonFit, JohnsonParams};
use zdl_core::numeric::fmt_sig12;
use zdl_core::zeros::{compute_zeros, parse_zeros, write_zeros, FormatKind, ZeroSet};

use crate::settings::DEFAULT_WINDOW;
use crate::svg::{render, Mark, Panel, Series, PALETTE};
use crate::{exit, CliError, Command, Settings};

const SWEEP_DEFAULT: (usize, usize) = (1, 999);
const FIT_DEFAULT: (usize, usize) = (1, 10);
/// Ordinate span of low zeros the detector looks for by default.
const DETECT_SPAN: (f64, f64) = (20.0, 50.0);
const DEFAULT_SAMPLES: usize = 100_000;

const SVG_WIDTH: u32 = 900;
const SVG_PANEL_HEIGHT: u32 = 360;

pub fn execute(settings: &Settings, command: &Command) -> Result<i32, CliError> {
    match command {
        Command::ComputeZeros { out, .. } => compute_zeros_cmd(settings, out.as_deref()),
        Command::Sweep { histograms } => sweep_cmd(settings, *histograms),
        Command::Detect { .. } => detect_cmd(settings),
        Command::Fit {
            plot_n,
            synthetic,
            samples,
            ..
        } => fit_cmd(settings, plot_n, synthetic.as_deref(), *samples),
        Command::Plane => plane_cmd(settings),
        Command::Paircorr { .. } => paircorr_cmd(settings),
    }
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::new(exit::FAILURE, format!("{}: {e}", path.display()))
}

fn output_path(settings: &Settings, name: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(&settings.out_dir).map_err(|e| io_error(&settings.out_dir, e))?;
    Ok(settings.out_dir.join(name))
}

/// Writes a file through a buffered writer, mapping every failure to exit 1.
fn write_file<F>(path: &Path, body: F) -> Result<(), CliError>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<(), CliError>,
{
    let file = File::create(path).map_err(|e| io_error(path, e))?;
    let mut out = BufWriter::new(file);
    body(&mut out).map_err(|e| match e.code {
        exit::FAILURE => io_error(path, e),
        _ => e,
    })?;
    out.flush().map_err(|e| io_error(path, e))?;
    info!("wrote {}", path.display());
    Ok(())
}

fn write_svg(settings: &Settings, name: &str, panels: &[Panel]) -> Result<(), CliError> {
    let path = output_path(settings, name)?;
    let doc = render(panels, SVG_WIDTH, SVG_PANEL_HEIGHT);
    write_file(&path, |out| {
        out.write_all(doc.as_bytes())
            .map_err(|e| io_error(&path, e))
    })
}

fn io(e: std::io::Error) -> CliError {
    CliError::new(exit::FAILURE, e.to_string())
}

/// Labelled zero sets from `--input`, or one computed block.
fn load_datasets(settings: &Settings) -> Result<Vec<(String, ZeroSet)>, CliError> {
    if settings.inputs.is_empty() {
        let count = settings.window.unwrap_or(DEFAULT_WINDOW);
        info!(
            "computing {count} zeros from index {}",
            settings.start_index
        );
        let zeros = compute_zeros(count, settings.start_index)?;
        return Ok(vec![(format!("zeros-{}", settings.start_index), zeros)]);
    }
    settings
        .inputs
        .iter()
        .map(|path| {
            let file = File::open(path)
                .map_err(|e| CliError::new(exit::INPUT, format!("{}: {e}", path.display())))?;
            let zeros = parse_zeros(BufReader::new(file), settings.format)
                .map_err(|e| CliError::from(e).context(path))?;
            let zeros = match settings.window {
                Some(w) if w < zeros.len() => zeros.truncated(w),
                _ => zeros,
            };
            let label = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string());
            info!("read {} zeros from {}", zeros.len(), path.display());
            Ok((label, zeros))
        })
        .collect()
}

fn load_single(settings: &Settings, command: &str) -> Result<(String, ZeroSet), CliError> {
    let mut sets = load_datasets(settings)?;
    if sets.len() > 1 {
        warn!("{command} uses only the first input, {}", sets[0].0);
    }
    Ok(sets.swap_remove(0))
}

impl CliError {
    fn context(mut self, path: &Path) -> Self {
        self.message = format!("{}: {}", path.display(), self.message);
        self
    }
}

fn compute_zeros_cmd(settings: &Settings, out: Option<&Path>) -> Result<i32, CliError> {
    let count = settings
        .count
        .or(settings.window)
        .ok_or_else(|| CliError::param("compute-zeros needs --count"))?;
    info!(
        "computing {count} zeros from index {}",
        settings.start_index
    );
    let zeros = compute_zeros(count, settings.start_index)?;
    info!(
        "found {} zeros in [{:.6}, {:.6}]",
        zeros.len(),
        zeros.ordinate(0),
        zeros.ordinate(zeros.len() - 1)
    );
    let path = match out {
        Some(p) => p.to_path_buf(),
        None => output_path(settings, "zeros.txt")?,
    };
    write_file(&path, |w| {
        Ok(write_zeros(w, &zeros, FormatKind::PlainList)?)
    })?;
    Ok(exit::OK)
}

fn sweep_cmd(settings: &Settings, histograms: bool) -> Result<i32, CliError> {
    let (label, zeros) = load_single(settings, "sweep")?;
    let (n_from, n_to) = settings.offset_range(SWEEP_DEFAULT, zeros.len())?;
    info!("{label}: sweeping n = {n_from}..={n_to}");
    let curve = sweep(&zeros, n_from, n_to)?;
    write_file(&output_path(settings, "moments.csv")?, |w| {
        Ok(curve.write_csv(w)?)
    })?;
    if histograms {
        let dists = sweep_distributions(&zeros, n_from, n_to, settings.bins)?;
        write_file(&output_path(settings, "histograms.csv")?, |w| {
            writeln!(w, "n,bin_lo,bin_hi,count").map_err(io)?;
            for d in &dists {
                let edges = d.histogram.edges();
                for (k, c) in d.histogram.counts().iter().enumerate() {
                    writeln!(
                        w,
                        "{},{},{},{c}",
                        d.n,
                        fmt_sig12(edges[k]),
                        fmt_sig12(edges[k + 1])
                    )
                    .map_err(io)?;
                }
            }
            Ok(())
        })?;
    }
    Ok(exit::OK)
}

/// Average number of zeros with ordinate below `t`.
fn zero_count_estimate(t: f64) -> f64 {
    let x = t / std::f64::consts::TAU;
    x * (x.ln() - 1.0) + 7.0 / 8.0
}

fn read_reference(path: &Path) -> Result<Vec<f64>, CliError> {
    let file = File::open(path)
        .map_err(|e| CliError::new(exit::INPUT, format!("{}: {e}", path.display())))?;
    let zeros = parse_zeros(BufReader::new(file), FormatKind::PlainList)
        .map_err(|e| CliError::from(e).context(path))?;
    Ok((0..zeros.len()).map(|i| zeros.ordinate(i)).collect())
}

fn detect_cmd(settings: &Settings) -> Result<i32, CliError> {
    let (label, zeros) = load_single(settings, "detect")?;
    let (n_from, n_to) = match (settings.n_from, settings.n_to) {
        (Some(a), Some(b)) => settings.offset_range((a, b), zeros.len())?,
        _ => {
            let (a, b) = offsets_spanning(&zeros, DETECT_SPAN.0, DETECT_SPAN.1, 1)?;
            settings.offset_range((a, b), zeros.len())?
        }
    };
    let reference = match &settings.reference {
        Some(path) => read_reference(path)?,
        None => {
            let len = zeros.len();
            let spacing = (zeros.offsets()[len - 1] - zeros.offsets()[0]) / (len - 1) as f64;
            let top = spacing * (n_to + 1) as f64 + 2.0;
            let count = (zero_count_estimate(top.max(15.0)) + 10.0).ceil() as usize;
            info!("computing {count} reference zeros up to about {top:.1}");
            let low = compute_zeros(count, 1)?;
            (0..low.len()).map(|i| low.ordinate(i)).collect()
        }
    };
    info!("{label}: detecting over n = {n_from}..={n_to}");
    let options = DetectionOptions {
        smoothing: settings.smooth,
        prominence_sd: settings.prominence,
        tolerance: settings.tolerance,
    };
    let d = detect_zeros_end_to_end(&zeros, n_from, n_to, &reference, options)?;
    let r = &d.report;
    write_file(&output_path(settings, "detection.csv")?, |w| {
        Ok(r.write_csv(w)?)
    })?;

    let points =
        |c: &zdl_core::stats::Curve| c.xs().iter().copied().zip(c.ys().iter().copied()).collect();
    let span = (
        d.second_derivative.xs()[0],
        d.second_derivative.xs()[d.second_derivative.len() - 1],
    );
    let panels = [
        Panel {
            title: format!("Variance of delta(n), {label}"),
            x_label: "mean delta(n)".into(),
            y_label: "variance".into(),
            series: vec![
                Series::new("variance", PALETTE[0], Mark::Line, points(&d.variance)),
                Series::new(
                    "smoothed",
                    PALETTE[2],
                    Mark::DashedLine,
                    points(&d.smoothed),
                ),
            ],
            guides: d.reference.clone(),
            x_range: Some(span),
            ..Default::default()
        },
        Panel {
            title: "Second derivative of the variance curve".into(),
            x_label: "mean delta(n)".into(),
            y_label: "second derivative".into(),
            series: vec![
                Series::new(
                    "second derivative",
                    PALETTE[0],
                    Mark::Line,
                    points(&d.second_derivative),
                ),
                Series::new(
                    "detected minima",
                    PALETTE[3],
                    Mark::Points,
                    d.minima
                        .minima_x
                        .iter()
                        .map(|&x| (x, interpolate(&d.second_derivative, x)))
                        .collect(),
                ),
            ],
            guides: d.reference.clone(),
            x_range: Some(span),
            ..Default::default()
        },
    ];
    write_svg(settings, "variance.svg", &panels)?;

    info!(
        "{} matched, {} unmatched detections, {} unmatched reference zeros",
        r.matches.len(),
        r.unmatched_detected.len(),
        r.unmatched_reference.len()
    );
    if r.unmatched_reference.len() > settings.max_unmatched {
        warn!(
            "unmatched reference zeros {} exceed the limit {}",
            r.unmatched_reference.len(),
            settings.max_unmatched
        );
        return Ok(exit::UNMATCHED);
    }
    Ok(exit::OK)
}

/// Linear interpolation of a curve at `x` inside its span.
fn interpolate(c: &zdl_core::stats::Curve, x: f64) -> f64 {
    let (xs, ys) = (c.xs(), c.ys());
    let i = xs.partition_point(|&v| v < x).clamp(1, xs.len() - 1);
    let t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    ys[i - 1] + t * (ys[i] - ys[i - 1])
}

/// Parses `FAMILY:gamma,delta,xi,lambda`.
fn parse_synthetic(spec: &str) -> Result<JohnsonParams, CliError> {
    let bad = || {
        CliError::param(format!(
            "--synthetic expects FAMILY:gamma,delta,xi,lambda, got {spec:?}"
        ))
    };
    let (family, rest) = spec.split_once(':').ok_or_else(bad)?;
    let family: Family = family.parse().map_err(|_| bad())?;
    let values: Vec<f64> = rest
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    let [gamma, delta, xi, lambda] = values[..] else {
        return Err(bad());
    };
    Ok(JohnsonParams::new(family, gamma, delta, xi, lambda)?)
}

fn overlay_panel(
    n: usize,
    values: &[f64],
    fit: &JohnsonFit,
    bins: usize,
) -> Result<Panel, CliError> {
    let hist = Histogram::from_values(values, bins)?;
    let edges = hist.edges();
    let w = hist.bin_width();
    let total = hist.total() as f64;
    let bars: Vec<(f64, f64)> = hist
        .counts()
        .iter()
        .enumerate()
        .map(|(k, &c)| (0.5 * (edges[k] + edges[k + 1]), c as f64 / (total * w)))
        .collect();
    let (lo, hi) = (edges[0], edges[edges.len() - 1]);
    let density: Vec<(f64, f64)> = (0..=400)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / 400.0;
            (x, fit.params.pdf(x))
        })
        .collect();
    Ok(Panel {
        title: format!(
            "delta({n}): Johnson {} fit, KS {:.4}",
            fit.params.family(),
            fit.ks_statistic
        ),
        x_label: format!("delta({n})"),
        y_label: "density".into(),
        series: vec![
            Series::new("histogram", PALETTE[0], Mark::Bars(w), bars),
            Series::new("Johnson density", PALETTE[1], Mark::Line, density),
        ],
        x_range: Some((lo, hi)),
        ..Default::default()
    })
}

fn fit_cmd(
    settings: &Settings,
    plot_n: &[usize],
    synthetic: Option<&str>,
    samples: Option<usize>,
) -> Result<i32, CliError> {
    let fits: Vec<(usize, JohnsonFit)>;
    let mut overlays = Vec::new();
    if let Some(spec) = synthetic {
        let params = parse_synthetic(spec)?;
        let count = samples.unwrap_or(DEFAULT_SAMPLES);
        if count == 0 {
            return Err(CliError::param("--samples must be positive"));
        }
        info!(
            "fitting {count} draws from {spec} with seed {}",
            settings.seed
        );
        let values = params.sample(count, settings.seed);
        let f = fit(&values)?;
        if plot_n.contains(&0) {
            overlays.push((0, overlay_panel(0, &values, &f, settings.bins)?));
        }
        fits = vec![(0, f)];
    } else {
        if samples.is_some() {
            warn!("--samples only applies to --synthetic");
        }
        let (label, zeros) = load_single(settings, "fit")?;
        let (n_from, n_to) = settings.offset_range(FIT_DEFAULT, zeros.len())?;
        info!("{label}: fitting n = {n_from}..={n_to}");
        let results: Vec<(usize, JohnsonFit, Option<Panel>)> = (n_from..=n_to)
            .into_par_iter()
            .map(|n| {
                let values = compute_deltas(&zeros, n)?;
                let f = fit(&values)?;
                let panel = if plot_n.contains(&n) {
                    Some(overlay_panel(n, &values, &f, settings.bins)?)
                } else {
                    None
                };
                Ok((n, f, panel))
            })
            .collect::<Result<_, CliError>>()?;
        let mut collected = Vec::with_capacity(results.len());
        for (n, f, panel) in results {
            if let Some(p) = panel {
                overlays.push((n, p));
            }
            collected.push((n, f));
        }
        fits = collected;
        for &n in plot_n {
            if !(n_from..=n_to).contains(&n) {
                warn!("--plot-n {n} is outside the fitted range {n_from}..={n_to}");
            }
        }
    }
    for (n, f) in &fits {
        if !f.converged {
            warn!(
                "fit for n={n} stopped after {} iterations without converging",
                f.iterations
            );
        }
    }
    write_file(&output_path(settings, "fits.csv")?, |w| {
        Ok(write_fits_csv(w, &fits)?)
    })?;
    for (n, panel) in &overlays {
        write_svg(
            settings,
            &format!("fit_n{n}.svg"),
            std::slice::from_ref(panel),
        )?;
    }

    let worst = fits.iter().map(|(_, f)| f.ks_statistic).fold(0.0, f64::max);
    info!("largest KS statistic {worst:.5}");
    if let Some(limit) = settings.ks_max {
        let failing: Vec<usize> = fits
            .iter()
            .filter(|(_, f)| f.ks_statistic > limit)
            .map(|(n, _)| *n)
            .collect();
        if !failing.is_empty() {
            warn!("KS statistic above {limit} for n = {failing:?}");
            return Ok(exit::KS_EXCEEDED);
        }
    }
    Ok(exit::OK)
}

fn plane_cmd(settings: &Settings) -> Result<i32, CliError> {
    let sets = load_datasets(settings)?;
    let mut curves = Vec::with_capacity(sets.len());
    for (label, zeros) in &sets {
        let (n_from, n_to) = settings.offset_range(SWEEP_DEFAULT, zeros.len())?;
        info!("{label}: sweeping n = {n_from}..={n_to}");
        curves.push((label.as_str(), sweep(zeros, n_from, n_to)?));
    }
    let borrowed: Vec<(&str, &zdl_core::delta::MomentCurve)> =
        curves.iter().map(|(l, c)| (*l, c)).collect();
    let report = plane_report(&borrowed);
    write_file(&output_path(settings, "plane.csv")?, |w| {
        Ok(report.write_points_csv(w)?)
    })?;
    write_file(&output_path(settings, "boundary.csv")?, |w| {
        Ok(report.write_boundary_csv(w)?)
    })?;

    let mut series = Vec::new();
    let (mut xs, mut ys) = (vec![0.0], vec![3.0]);
    for (k, g) in report.groups.iter().enumerate() {
        let pts: Vec<(f64, f64)> = g.points.iter().map(|p| (p.skewness, p.kurtosis)).collect();
        xs.extend(pts.iter().map(|p| p.0));
        ys.extend(pts.iter().map(|p| p.1));
        series.push(Series::new(
            g.label.clone(),
            PALETTE[k % PALETTE.len()],
            Mark::Points,
            pts,
        ));
        let single: Vec<(f64, f64)> = g
            .points
            .iter()
            .filter(|p| p.n == 1)
            .map(|p| (p.skewness, p.kurtosis))
            .collect();
        if !single.is_empty() {
            series.push(Series::new(
                format!("{} n=1", g.label),
                "#ff7f0e",
                Mark::Points,
                single,
            ));
        }
        if g.dropped > 0 {
            warn!(
                "{}: {} points outside the Johnson region were dropped",
                g.label, g.dropped
            );
        }
        info!(
            "{}: fraction with kurtosis below 3 = {:.3}",
            g.label,
            g.fraction_below_normal()
        );
        if let Some(s) = g.separation(1) {
            info!("{}: n=1 separation = {s:.3} cluster radii", g.label);
        }
    }
    let upper: Vec<(f64, f64)> = report
        .boundary
        .iter()
        .map(|&(b1, k)| (b1.sqrt(), k))
        .collect();
    let lower: Vec<(f64, f64)> = report
        .boundary
        .iter()
        .map(|&(b1, k)| (-b1.sqrt(), k))
        .collect();
    series.push(Series::new(
        "SL boundary",
        "#444444",
        Mark::DashedLine,
        upper,
    ));
    series.push(Series::new("", "#444444", Mark::DashedLine, lower));
    series.push(Series::new(
        "normal (0, 3)",
        "#000000",
        Mark::Points,
        vec![(0.0, 3.0)],
    ));
    let range = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let pad = 0.08 * (hi - lo).max(1e-3);
        (lo - pad, hi + pad)
    };
    let panel = Panel {
        title: "Skewness-kurtosis plane".into(),
        x_label: "skewness".into(),
        y_label: "kurtosis".into(),
        series,
        x_range: Some(range(&xs)),
        y_range: Some(range(&ys)),
        ..Default::default()
    };
    write_svg(settings, "plane.svg", &[panel])?;
    Ok(exit::OK)
}

fn paircorr_cmd(settings: &Settings) -> Result<i32, CliError> {
    let (label, zeros) = load_single(settings, "paircorr")?;
    let unfolded = unfold(&zeros)?;
    let curve = empirical_pair_correlation(&unfolded, settings.max_x, settings.bin_width)?;
    let mae = pair_correlation_mae(&curve);
    info!("{label}: mean absolute deviation from 1 - sinc^2 = {mae:.5}");
    write_file(&output_path(settings, "paircorr.csv")?, |w| {
        writeln!(w, "x,empirical,model").map_err(io)?;
        for (&x, &y) in curve.xs().iter().zip(curve.ys()) {
            writeln!(
                w,
                "{},{},{}",
                fmt_sig12(x),
                fmt_sig12(y),
                fmt_sig12(montgomery_r2(x))
            )
            .map_err(io)?;
        }
        Ok(())
    })?;
    let model: Vec<(f64, f64)> = (0..=600)
        .map(|i| {
            let x = settings.max_x * i as f64 / 600.0;
            (x, montgomery_r2(x))
        })
        .collect();
    let empirical = curve
        .xs()
        .iter()
        .copied()
        .zip(curve.ys().iter().copied())
        .collect();
    let panel = Panel {
        title: format!("Pair correlation, {label}"),
        x_label: "normalized spacing x".into(),
        y_label: "R2(x)".into(),
        series: vec![
            Series::new(
                "empirical",
                PALETTE[0],
                Mark::Bars(settings.bin_width),
                empirical,
            ),
            Series::new("1 - sinc^2", PALETTE[1], Mark::Line, model),
        ],
        x_range: Some((0.0, settings.max_x)),
        ..Default::default()
    };
    write_svg(settings, "paircorr.svg", &[panel])?;
    Ok(exit::OK)
}
