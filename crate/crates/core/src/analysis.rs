//! Zero-level analyses built on the delta sweeps: Montgomery's pair
//! correlation, skewness behaviour where `mean(delta(n))` passes a zero, the
//! skewness-kurtosis plane, and recovery of zero ordinates from minima of
//! the second derivative of the variance curve.

use std::f64::consts::PI;
use std::io::Write;

use crate::delta::{sweep, MomentCurve};
use crate::error::{Error, Result};
use crate::johnson::{select_family, sl_boundary, Family};
use crate::numeric::{fmt_sig12, TWO_PI};
use crate::stats::{
    find_local_minima, match_extrema, second_derivative, smooth, Curve, DetectionReport,
    ExtremaReport, DEFAULT_PROMINENCE_SD, DEFAULT_SMOOTHING_WINDOW, DEFAULT_TOLERANCE,
};
use crate::zeros::ZeroSet;

/// `1 - (sin(pi x) / (pi x))^2`.
pub fn montgomery_r2(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let s = (PI * x).sin() / (PI * x);
    1.0 - s * s
}

/// Smallest ordinate accepted by [`unfold`]; below it the density
/// `ln(t / 2 pi) / 2 pi` is not positive.
pub const UNFOLD_FLOOR: f64 = TWO_PI;

/// Rescales the gaps by the local zero density so the mean spacing is 1.
/// The first zero maps to 0.
pub fn unfold(zeros: &ZeroSet) -> Result<Vec<f64>> {
    if zeros.is_empty() {
        return Err(Error::EmptyInput);
    }
    let first = zeros.ordinate(0);
    if !(first > UNFOLD_FLOOR) {
        return Err(Error::domain(format!(
            "ordinate {first} is below the unfolding floor 2*pi"
        )));
    }
    let offsets = zeros.offsets();
    let mut out = Vec::with_capacity(offsets.len());
    let mut acc = 0.0;
    out.push(acc);
    for i in 1..offsets.len() {
        let density = (zeros.ordinate(i - 1) / TWO_PI).ln() / TWO_PI;
        acc += (offsets[i] - offsets[i - 1]) * density;
        out.push(acc);
    }
    Ok(out)
}

/// Minimum sequence length for [`empirical_pair_correlation`].
pub const MIN_PAIR_CORRELATION_POINTS: usize = 1000;

/// Histogram of all positive pairwise differences up to `max_x`, divided
/// by `len * bin_width` so that an uncorrelated sequence gives 1. The
/// input must be increasing. xs are bin centres.
pub fn empirical_pair_correlation(unfolded: &[f64], max_x: f64, bin_width: f64) -> Result<Curve> {
    if !(bin_width > 0.0 && bin_width.is_finite()) {
        return Err(Error::param(format!(
            "bin width must be positive, got {bin_width}"
        )));
    }
    if !(max_x > 0.0 && max_x.is_finite()) {
        return Err(Error::param(format!("max_x must be positive, got {max_x}")));
    }
    if unfolded.len() < MIN_PAIR_CORRELATION_POINTS {
        return Err(Error::InsufficientPoints {
            needed: MIN_PAIR_CORRELATION_POINTS,
            got: unfolded.len(),
        });
    }
    if unfolded.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::param("unfolded sequence must be non-decreasing"));
    }
    let bins = ((max_x / bin_width).round() as usize).max(1);
    let mut counts = vec![0u64; bins];
    for (i, &a) in unfolded.iter().enumerate() {
        for &b in &unfolded[i + 1..] {
            let d = b - a;
            if d > max_x {
                break;
            }
            if d > 0.0 {
                counts[((d / bin_width) as usize).min(bins - 1)] += 1;
            }
        }
    }
    let norm = unfolded.len() as f64 * bin_width;
    let xs = (0..bins).map(|k| (k as f64 + 0.5) * bin_width).collect();
    let ys = counts.iter().map(|&c| c as f64 / norm).collect();
    Curve::new(xs, ys)
}

/// Mean absolute difference between an empirical pair correlation and
/// [`montgomery_r2`] at its xs.
pub fn pair_correlation_mae(curve: &Curve) -> f64 {
    let total: f64 = curve
        .xs()
        .iter()
        .zip(curve.ys())
        .map(|(&x, &y)| (y - montgomery_r2(x)).abs())
        .sum();
    total / curve.len() as f64
}

/// Skewness on both sides of a reference zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub zero: f64,
    pub skew_before: f64,
    pub skew_after: f64,
}

impl Crossing {
    pub fn change(&self) -> f64 {
        self.skew_after - self.skew_before
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SkewnessProfile {
    /// `(mean(delta(n)), skewness)` ordered by mean.
    pub entries: Vec<(f64, f64)>,
    pub crossings: Vec<Crossing>,
}

/// Skewness at the last entry below and the first entry above each
/// reference zero that the curve spans.
pub fn skewness_profile(curve: &MomentCurve, reference: &[f64]) -> SkewnessProfile {
    let mut entries: Vec<(f64, f64)> = curve.entries.iter().map(|e| (e.mean, e.skewness)).collect();
    entries.sort_by(|a, b| a.0.total_cmp(&b.0));
    let crossings = reference
        .iter()
        .filter_map(|&zero| {
            let k = entries.partition_point(|e| e.0 < zero);
            let before = entries[..k].last()?;
            let after = entries[k..].iter().find(|e| e.0 > zero)?;
            Some(Crossing {
                zero,
                skew_before: before.1,
                skew_after: after.1,
            })
        })
        .collect();
    SkewnessProfile { entries, crossings }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanePoint {
    pub n: usize,
    pub skewness: f64,
    pub kurtosis: f64,
    pub family: Family,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlaneGroup {
    pub label: String,
    pub points: Vec<PlanePoint>,
    /// Entries dropped for violating `kurtosis > 1 + skewness^2`.
    pub dropped: usize,
}

impl PlaneGroup {
    /// Share of points with kurtosis below the normal value 3.
    pub fn fraction_below_normal(&self) -> f64 {
        if self.points.is_empty() {
            return 0.0;
        }
        let below = self.points.iter().filter(|p| p.kurtosis < 3.0).count();
        below as f64 / self.points.len() as f64
    }

    /// Distance in the (skewness, kurtosis) plane from the `n = single`
    /// point to the centroid of all other points, in units of their RMS
    /// distance to that centroid.
    pub fn separation(&self, single: usize) -> Option<f64> {
        let lone = self.points.iter().find(|p| p.n == single)?;
        let rest: Vec<&PlanePoint> = self.points.iter().filter(|p| p.n != single).collect();
        if rest.len() < 2 {
            return None;
        }
        let k = rest.len() as f64;
        let cs = rest.iter().map(|p| p.skewness).sum::<f64>() / k;
        let ck = rest.iter().map(|p| p.kurtosis).sum::<f64>() / k;
        let spread = (rest
            .iter()
            .map(|p| (p.skewness - cs).powi(2) + (p.kurtosis - ck).powi(2))
            .sum::<f64>()
            / k)
            .sqrt();
        let dist = (lone.skewness - cs).hypot(lone.kurtosis - ck);
        Some(dist / spread)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlaneReport {
    pub groups: Vec<PlaneGroup>,
    /// SL curve as `(skewness^2, kurtosis)` pairs, by increasing skewness.
    pub boundary: Vec<(f64, f64)>,
}

pub const BOUNDARY_DELTA_RANGE: (f64, f64) = (0.3, 10.0);
const BOUNDARY_SAMPLES: usize = 200;

/// SL curve sampled log-uniformly in the shape parameter.
pub fn sl_boundary_polyline(samples: usize) -> Vec<(f64, f64)> {
    let (lo, hi) = BOUNDARY_DELTA_RANGE;
    let samples = samples.max(2);
    (0..samples)
        .rev()
        .map(|k| {
            let t = k as f64 / (samples - 1) as f64;
            let d = lo * (hi / lo).powf(t);
            sl_boundary(d).expect("positive shape")
        })
        .collect()
}

/// One plane point per curve entry, classified by Johnson family.
pub fn plane_report(datasets: &[(&str, &MomentCurve)]) -> PlaneReport {
    let groups = datasets
        .iter()
        .map(|(label, curve)| {
            let mut points = Vec::with_capacity(curve.len());
            let mut dropped = 0;
            for e in &curve.entries {
                match select_family(e.skewness, e.kurtosis) {
                    Ok(family) => points.push(PlanePoint {
                        n: e.n,
                        skewness: e.skewness,
                        kurtosis: e.kurtosis,
                        family,
                    }),
                    Err(_) => dropped += 1,
                }
            }
            if dropped > 0 {
                log::warn!("{label}: dropped {dropped} infeasible moment pairs");
            }
            PlaneGroup {
                label: label.to_string(),
                points,
                dropped,
            }
        })
        .collect();
    PlaneReport {
        groups,
        boundary: sl_boundary_polyline(BOUNDARY_SAMPLES),
    }
}

impl PlaneReport {
    pub fn write_points_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "dataset,n,skewness,kurtosis,family")?;
        for g in &self.groups {
            for p in &g.points {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    g.label,
                    p.n,
                    fmt_sig12(p.skewness),
                    fmt_sig12(p.kurtosis),
                    p.family
                )?;
            }
        }
        Ok(())
    }

    pub fn write_boundary_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "skew_sq,kurtosis")?;
        for &(b1, b2) in &self.boundary {
            writeln!(out, "{},{}", fmt_sig12(b1), fmt_sig12(b2))?;
        }
        Ok(())
    }
}

/// Knobs of the detection pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionOptions {
    /// Odd moving-average window applied to the variance curve.
    pub smoothing: usize,
    /// Minimum prominence in standard deviations of the second derivative.
    pub prominence_sd: f64,
    pub tolerance: f64,
}

impl Default for DetectionOptions {
    fn default() -> Self {
        DetectionOptions {
            smoothing: DEFAULT_SMOOTHING_WINDOW,
            prominence_sd: DEFAULT_PROMINENCE_SD,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

/// Every intermediate of a detection run.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub moments: MomentCurve,
    /// Variance against `mean(delta(n))`.
    pub variance: Curve,
    pub smoothed: Curve,
    pub second_derivative: Curve,
    pub threshold: f64,
    pub minima: ExtremaReport,
    /// Reference zeros inside the second-derivative span.
    pub reference: Vec<f64>,
    pub report: DetectionReport,
}

/// Variance of `delta(n)` as a curve over `mean(delta(n))`.
pub fn variance_curve(moments: &MomentCurve) -> Result<Curve> {
    Curve::new(
        moments.entries.iter().map(|e| e.mean).collect(),
        moments.entries.iter().map(|e| e.variance).collect(),
    )
}

/// Sweep, smooth the variance curve, differentiate twice, take the
/// prominent minima and match them to the reference zeros that fall inside
/// the differentiated span.
pub fn detect_zeros_end_to_end(
    zeros: &ZeroSet,
    n_from: usize,
    n_to: usize,
    reference: &[f64],
    options: DetectionOptions,
) -> Result<Detection> {
    if !(options.prominence_sd >= 0.0) {
        return Err(Error::param("prominence must be non-negative"));
    }
    if !(options.tolerance > 0.0) {
        return Err(Error::param("tolerance must be positive"));
    }
    let moments = sweep(zeros, n_from, n_to)?;
    let variance = variance_curve(&moments)?;
    let smoothed = smooth(&variance, options.smoothing)?;
    let second = second_derivative(&smoothed)?;
    let threshold = options.prominence_sd * second.y_std();
    let minima = find_local_minima(&second, threshold);
    let (lo, hi) = (second.xs()[0], second.xs()[second.len() - 1]);
    let mut inside: Vec<f64> = reference
        .iter()
        .copied()
        .filter(|&r| r >= lo && r <= hi)
        .collect();
    inside.sort_by(f64::total_cmp);
    let report = match_extrema(&minima, &inside, options.tolerance);
    Ok(Detection {
        moments,
        variance,
        smoothed,
        second_derivative: second,
        threshold,
        minima,
        reference: inside,
        report,
    })
}

/// Offsets `n` whose `mean(delta(n))` should cover `[lo, hi]`, estimated
/// from the mean spacing of the block and padded by `pad` offsets.
pub fn offsets_spanning(zeros: &ZeroSet, lo: f64, hi: f64, pad: usize) -> Result<(usize, usize)> {
    let len = zeros.len();
    if len < 2 {
        return Err(Error::InsufficientPoints {
            needed: 2,
            got: len,
        });
    }
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::param(format!("bad ordinate span [{lo}, {hi}]")));
    }
    let offsets = zeros.offsets();
    let spacing = (offsets[len - 1] - offsets[0]) / (len - 1) as f64;
    let n_from = ((lo / spacing).floor() as usize).saturating_sub(pad).max(1);
    let n_to = (hi / spacing).ceil() as usize + pad;
    if n_to >= len {
        return Err(Error::OffsetTooLarge { n: n_to, len });
    }
    Ok((n_from, n_to))
}
