//! Differences of zero ordinates, `delta(n) = gamma(i + n) - gamma(i)`, and
//! their per-offset distributions.
//!
//! Moments are accumulated in one pass with mergeable partial states. Each
//! offset is reduced over fixed-size chunks of the starting index, and the
//! chunk states are merged strictly left to right, so results are
//! bit-identical for a given chunk size regardless of threading.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::fmt_sig12;
use crate::zeros::ZeroSet;

/// Starting indices per partial moment state.
pub const DEFAULT_CHUNK_SIZE: usize = 1 << 16;

/// Default number of histogram bins.
pub const DEFAULT_BIN_COUNT: usize = 200;

/// Running central moment sums (count, mean, M2, M3, M4).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MomentAccumulator {
    count: u64,
    mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

impl MomentAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        let n1 = self.count as f64;
        self.count += 1;
        let n = self.count as f64;
        let delta = x - self.mean;
        let delta_n = delta / n;
        let delta_n2 = delta_n * delta_n;
        let term1 = delta * delta_n * n1;
        self.m4 += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * self.m2
            - 4.0 * delta_n * self.m3;
        self.m3 += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * self.m2;
        self.m2 += term1;
        self.mean += delta_n;
    }

    /// Combines two disjoint partial states.
    pub fn merge(&self, other: &Self) -> Self {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let na = self.count as f64;
        let nb = other.count as f64;
        let n = na + nb;
        let delta = other.mean - self.mean;
        let delta2 = delta * delta;
        let mean = self.mean + delta * nb / n;
        let m2 = self.m2 + other.m2 + delta2 * na * nb / n;
        let m3 = self.m3
            + other.m3
            + delta2 * delta * na * nb * (na - nb) / (n * n)
            + 3.0 * delta * (na * other.m2 - nb * self.m2) / n;
        let m4 = self.m4
            + other.m4
            + delta2 * delta2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
            + 6.0 * delta2 * (na * na * other.m2 + nb * nb * self.m2) / (n * n)
            + 4.0 * delta * (na * other.m3 - nb * self.m3) / n;
        MomentAccumulator {
            count: self.count + other.count,
            mean,
            m2,
            m3,
            m4,
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn moments(&self) -> Moments {
        let n = self.count as f64;
        let variance = if self.count > 1 {
            (self.m2 / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        // Rounding leaves a tiny m2 on constant input; treat it as zero.
        let scale = self.mean.abs().max(f64::MIN_POSITIVE);
        let degenerate = self.m2 <= 0.0 || (self.m2 / n).sqrt() <= 1e-12 * scale;
        let (skewness, kurtosis) = if degenerate {
            (0.0, 3.0)
        } else {
            (
                n.sqrt() * self.m3 / self.m2.powf(1.5),
                n * self.m4 / (self.m2 * self.m2),
            )
        };
        Moments {
            count: self.count,
            mean: self.mean,
            variance,
            skewness,
            kurtosis,
        }
    }
}

impl Extend<f64> for MomentAccumulator {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.push(x);
        }
    }
}

impl FromIterator<f64> for MomentAccumulator {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        acc.extend(iter);
        acc
    }
}

/// Summary moments. Variance is unbiased; skewness and kurtosis are the
/// standardized third and fourth central moments (normal kurtosis = 3).
/// A zero-variance sample reports skewness 0 and kurtosis 3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub kurtosis: f64,
}

/// Moments of `values` reduced over fixed chunks merged left to right.
pub fn chunked_moments(values: &[f64], chunk_size: usize) -> Moments {
    let chunk_size = chunk_size.max(1);
    values
        .chunks(chunk_size)
        .map(|c| c.iter().copied().collect::<MomentAccumulator>())
        .fold(MomentAccumulator::new(), |acc, part| acc.merge(&part))
        .moments()
}

/// Equal-width histogram.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    edges: Vec<f64>,
    counts: Vec<u64>,
}

impl Histogram {
    /// Bins `values` into `bin_count` equal-width bins spanning
    /// `[min, max]`. A constant sample gets bins of width 1/bin_count
    /// starting at the value.
    pub fn from_values(values: &[f64], bin_count: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if bin_count == 0 {
            return Err(Error::param("bin_count must be positive"));
        }
        let (min, max) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        let width = if max > min {
            (max - min) / bin_count as f64
        } else {
            1.0 / bin_count as f64
        };
        let mut edges: Vec<f64> = (0..=bin_count).map(|i| min + width * i as f64).collect();
        edges[bin_count] = edges[bin_count].max(max);
        let mut counts = vec![0u64; bin_count];
        for &v in values {
            let idx = (((v - min) / width) as usize).min(bin_count - 1);
            counts[idx] += 1;
        }
        Ok(Histogram { edges, counts })
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn bin_width(&self) -> f64 {
        self.edges[1] - self.edges[0]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Distribution of `delta(n)` over a window of starting zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaDistribution {
    pub n: usize,
    pub values_count: usize,
    pub histogram: Histogram,
    pub moments: Moments,
}

/// `delta(n)` for every start `i` with `i + n` inside the block.
pub fn compute_deltas(zeros: &ZeroSet, n: usize) -> Result<Vec<f64>> {
    let offsets = zeros.offsets();
    check_offset(n, offsets.len())?;
    Ok(offsets[n..]
        .iter()
        .zip(offsets)
        .map(|(hi, lo)| hi - lo)
        .collect())
}

fn check_offset(n: usize, len: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::param("offset n must be positive"));
    }
    if n >= len {
        return Err(Error::OffsetTooLarge { n, len });
    }
    Ok(())
}

/// Histogram and raw-value moments of one offset's deltas.
pub fn accumulate_distribution(
    n: usize,
    deltas: &[f64],
    bin_count: usize,
) -> Result<DeltaDistribution> {
    if deltas.is_empty() {
        return Err(Error::EmptyInput);
    }
    if bin_count < 10 {
        return Err(Error::param(format!(
            "bin_count must be >= 10, got {bin_count}"
        )));
    }
    Ok(DeltaDistribution {
        n,
        values_count: deltas.len(),
        histogram: Histogram::from_values(deltas, bin_count)?,
        moments: chunked_moments(deltas, DEFAULT_CHUNK_SIZE),
    })
}

/// Moments of one offset, streamed without materialising the deltas.
fn offset_moments(offsets: &[f64], n: usize, chunk_size: usize) -> Moments {
    let count = offsets.len() - n;
    (0..count)
        .step_by(chunk_size)
        .map(|start| {
            let end = (start + chunk_size).min(count);
            (start..end)
                .map(|i| offsets[i + n] - offsets[i])
                .collect::<MomentAccumulator>()
        })
        .fold(MomentAccumulator::new(), |acc, part| acc.merge(&part))
        .moments()
}

/// One row of a [`MomentCurve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEntry {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    pub count: u64,
}

impl MomentEntry {
    fn new(n: usize, m: &Moments) -> Self {
        MomentEntry {
            n,
            mean: m.mean,
            variance: m.variance,
            skewness: m.skewness,
            kurtosis: m.kurtosis,
            count: m.count,
        }
    }
}

/// Per-offset moments ordered by `n`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MomentCurve {
    pub entries: Vec<MomentEntry>,
}

pub const MOMENT_CSV_HEADER: &str = "n,mean,variance,skewness,kurtosis,count";

impl MomentCurve {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{MOMENT_CSV_HEADER}")?;
        for e in &self.entries {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                e.n,
                fmt_sig12(e.mean),
                fmt_sig12(e.variance),
                fmt_sig12(e.skewness),
                fmt_sig12(e.kurtosis),
                e.count
            )?;
        }
        Ok(())
    }
}

fn check_range(zeros: &ZeroSet, n_from: usize, n_to: usize) -> Result<()> {
    if n_from == 0 || n_from > n_to {
        return Err(Error::param(format!("bad offset range {n_from}..={n_to}")));
    }
    check_offset(n_to, zeros.len())
}

/// Moments of `delta(n)` for every `n` in `n_from..=n_to`.
pub fn sweep(zeros: &ZeroSet, n_from: usize, n_to: usize) -> Result<MomentCurve> {
    sweep_with_chunk(zeros, n_from, n_to, DEFAULT_CHUNK_SIZE)
}

pub fn sweep_with_chunk(
    zeros: &ZeroSet,
    n_from: usize,
    n_to: usize,
    chunk_size: usize,
) -> Result<MomentCurve> {
    check_range(zeros, n_from, n_to)?;
    let offsets = zeros.offsets();
    let chunk_size = chunk_size.max(1);
    let entries = (n_from..=n_to)
        .into_par_iter()
        .map(|n| MomentEntry::new(n, &offset_moments(offsets, n, chunk_size)))
        .collect();
    Ok(MomentCurve { entries })
}

/// Full distributions (histogram + moments) for every `n` in range.
pub fn sweep_distributions(
    zeros: &ZeroSet,
    n_from: usize,
    n_to: usize,
    bin_count: usize,
) -> Result<Vec<DeltaDistribution>> {
    check_range(zeros, n_from, n_to)?;
    (n_from..=n_to)
        .into_par_iter()
        .map(|n| accumulate_distribution(n, &compute_deltas(zeros, n)?, bin_count))
        .collect()
}
