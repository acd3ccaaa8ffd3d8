//! Curves on non-uniform grids: second differences, smoothing, minima with
//! prominence, and matching of detected minima against reference points.

use std::io::Write;

use crate::error::{Error, Result};
use crate::numeric::fmt_sig12;

/// Default centered moving-average window applied before differentiation.
pub const DEFAULT_SMOOTHING_WINDOW: usize = 3;

/// Default prominence threshold in units of the sample standard deviation
/// of the curve being searched.
pub const DEFAULT_PROMINENCE_SD: f64 = 0.5;

/// Default matching tolerance in ordinate units.
pub const DEFAULT_TOLERANCE: f64 = 0.1;

/// Samples `ys` over strictly increasing `xs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl Curve {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::param(format!(
                "curve has {} xs but {} ys",
                xs.len(),
                ys.len()
            )));
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(Error::param("curve contains non-finite values"));
        }
        if let Some(i) = xs.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::param(format!(
                "curve xs not increasing at index {}",
                i + 1
            )));
        }
        Ok(Curve { xs, ys })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Sub-curve of the points whose x lies in `[lo, hi]`, widened by
    /// `pad` points on each side when available.
    pub fn window(&self, lo: f64, hi: f64, pad: usize) -> Curve {
        let first = self.xs.partition_point(|&x| x < lo).saturating_sub(pad);
        let last = (self.xs.partition_point(|&x| x <= hi) + pad).min(self.len());
        let last = last.max(first);
        Curve {
            xs: self.xs[first..last].to_vec(),
            ys: self.ys[first..last].to_vec(),
        }
    }

    /// Sample standard deviation of the ys (0 for fewer than two points).
    pub fn y_std(&self) -> f64 {
        let n = self.ys.len();
        if n < 2 {
            return 0.0;
        }
        let mean = self.ys.iter().sum::<f64>() / n as f64;
        let ss: f64 = self.ys.iter().map(|y| (y - mean) * (y - mean)).sum();
        (ss / (n - 1) as f64).sqrt()
    }
}

/// Three-point second difference at interior points of a non-uniform grid.
pub fn second_derivative(curve: &Curve) -> Result<Curve> {
    let n = curve.len();
    if n < 3 {
        return Err(Error::InsufficientPoints { needed: 3, got: n });
    }
    let (x, y) = (curve.xs(), curve.ys());
    let ys = (1..n - 1)
        .map(|i| {
            let h1 = x[i] - x[i - 1];
            let h2 = x[i + 1] - x[i];
            2.0 * (h1 * y[i + 1] - (h1 + h2) * y[i] + h2 * y[i - 1]) / (h1 * h2 * (h1 + h2))
        })
        .collect();
    Ok(Curve {
        xs: x[1..n - 1].to_vec(),
        ys,
    })
}

/// Centered moving average. Near the ends the window shrinks symmetrically
/// so every output is a centered mean.
pub fn smooth(curve: &Curve, window: usize) -> Result<Curve> {
    if window == 0 || window % 2 == 0 {
        return Err(Error::param(format!(
            "smoothing window must be odd, got {window}"
        )));
    }
    if window > curve.len() {
        return Err(Error::param(format!(
            "smoothing window {window} exceeds curve length {}",
            curve.len()
        )));
    }
    let y = curve.ys();
    let n = y.len();
    let half = window / 2;
    let ys = (0..n)
        .map(|i| {
            let k = half.min(i).min(n - 1 - i);
            if k == 0 {
                return y[i];
            }
            y[i - k..=i + k].iter().sum::<f64>() / (2 * k + 1) as f64
        })
        .collect();
    Ok(Curve {
        xs: curve.xs.clone(),
        ys,
    })
}

/// Local minima with their prominences, sorted by x.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExtremaReport {
    pub minima_x: Vec<f64>,
    pub prominence: Vec<f64>,
}

impl ExtremaReport {
    pub fn len(&self) -> usize {
        self.minima_x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.minima_x.is_empty()
    }
}

/// Strict local minima whose prominence exceeds `min_prominence`.
///
/// Prominence is the rise from the minimum to the lower of the two highest
/// points reached on each side before the curve drops below the minimum
/// again (or the curve ends). A flat-bottomed minimum is reported at the
/// midpoint of its plateau; an isolated one at the vertex of the parabola
/// through it and its neighbours, which resolves positions finer than the
/// grid.
pub fn find_local_minima(curve: &Curve, min_prominence: f64) -> ExtremaReport {
    let (x, y) = (curve.xs(), curve.ys());
    let n = y.len();
    let mut report = ExtremaReport::default();
    let mut i = 1;
    while i + 1 < n {
        // Extend over a plateau of equal values.
        let mut j = i;
        while j + 1 < n && y[j + 1] == y[i] {
            j += 1;
        }
        if j + 1 >= n || !(y[i] < y[i - 1] && y[i] < y[j + 1]) {
            i = j + 1;
            continue;
        }
        let v = y[i];
        let left = y[..i]
            .iter()
            .rev()
            .take_while(|&&h| h >= v)
            .fold(f64::NEG_INFINITY, |m, &h| m.max(h));
        let right = y[j + 1..]
            .iter()
            .take_while(|&&h| h >= v)
            .fold(f64::NEG_INFINITY, |m, &h| m.max(h));
        let prominence = left.min(right) - v;
        if prominence > min_prominence {
            let at = if j > i {
                0.5 * (x[i] + x[j])
            } else {
                parabola_vertex(&x[i - 1..=i + 1], &y[i - 1..=i + 1])
            };
            report.minima_x.push(at);
            report.prominence.push(prominence);
        }
        i = j + 1;
    }
    report
}

fn parabola_vertex(x: &[f64], y: &[f64]) -> f64 {
    let (a, b) = (x[1] - x[0], x[1] - x[2]);
    let (fa, fb) = (y[1] - y[0], y[1] - y[2]);
    let den = a * fb - b * fa;
    if den == 0.0 {
        return x[1];
    }
    (x[1] - 0.5 * (a * a * fb - b * b * fa) / den).clamp(x[0], x[2])
}

/// One detected/reference pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Match {
    pub detected: f64,
    pub reference: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DetectionReport {
    /// Matches sorted by reference position.
    pub matches: Vec<Match>,
    pub unmatched_detected: Vec<f64>,
    pub unmatched_reference: Vec<f64>,
}

pub const DETECTION_CSV_HEADER: &str = "detected_x,reference_x,abs_error";

impl DetectionReport {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{DETECTION_CSV_HEADER}")?;
        for m in &self.matches {
            writeln!(
                out,
                "{},{},{}",
                fmt_sig12(m.detected),
                fmt_sig12(m.reference),
                fmt_sig12(m.abs_error)
            )?;
        }
        writeln!(
            out,
            "# unmatched_detected={}",
            self.unmatched_detected.len()
        )?;
        writeln!(
            out,
            "# unmatched_reference={}",
            self.unmatched_reference.len()
        )?;
        Ok(())
    }
}

/// Greedy matching: repeatedly pairs the closest remaining
/// (detected, reference) couple until no couple lies within `tolerance`.
pub fn match_extrema(
    detected: &ExtremaReport,
    reference: &[f64],
    tolerance: f64,
) -> DetectionReport {
    let det = &detected.minima_x;
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, &d) in det.iter().enumerate() {
        for (j, &r) in reference.iter().enumerate() {
            let e = (d - r).abs();
            if e <= tolerance {
                pairs.push((e, i, j));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut det_used = vec![false; det.len()];
    let mut ref_used = vec![false; reference.len()];
    let mut matches = Vec::new();
    for (e, i, j) in pairs {
        if det_used[i] || ref_used[j] {
            continue;
        }
        det_used[i] = true;
        ref_used[j] = true;
        matches.push(Match {
            detected: det[i],
            reference: reference[j],
            abs_error: e,
        });
    }
    matches.sort_by(|a, b| a.reference.total_cmp(&b.reference));
    let unmatched = |vals: &[f64], used: &[bool]| {
        vals.iter()
            .zip(used)
            .filter(|(_, &u)| !u)
            .map(|(&v, _)| v)
            .collect()
    };
    DetectionReport {
        matches,
        unmatched_detected: unmatched(det, &det_used),
        unmatched_reference: unmatched(reference, &ref_used),
    }
}
