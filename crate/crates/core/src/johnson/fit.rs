//! Fitting Johnson curves to samples.
//!
//! The family comes from the sample skewness and kurtosis. Starting values
//! come from the four-percentile method of Slifker and Shapiro (normal
//! scores +-0.5 and +-1.5), or from moment matching in the transformed
//! space when the percentiles do not admit a valid member of the family.
//! Maximum likelihood then refines them with Nelder-Mead in an
//! unconstrained parameterisation.

use std::io::Write;

use super::simplex::{nelder_mead, SimplexOptions};
use super::{select_family, Family, JohnsonParams};
use crate::delta::chunked_moments;
use crate::delta::DEFAULT_CHUNK_SIZE;
use crate::error::{Error, Result};
use crate::numeric::{fmt_sig12, normal_cdf};

/// Smallest sample accepted by [`fit`].
pub const MIN_FIT_SAMPLES: usize = 100;

/// Normal score of the inner percentile pair.
const PERCENTILE_Z: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JohnsonFit {
    pub params: JohnsonParams,
    /// Kolmogorov-Smirnov distance between the sample and the fit.
    pub ks_statistic: f64,
    /// Total log-likelihood of the sample under the fit.
    pub log_likelihood: f64,
    /// Total log-likelihood at the starting values.
    pub initial_log_likelihood: f64,
    pub iterations: usize,
    /// False when the simplex hit its iteration cap; the fit is then the
    /// best point seen.
    pub converged: bool,
}

/// Fits the family selected by the sample moments.
pub fn fit(values: &[f64]) -> Result<JohnsonFit> {
    check_sample(values)?;
    let m = chunked_moments(values, DEFAULT_CHUNK_SIZE);
    let family = select_family(m.skewness, m.kurtosis)
        .map_err(|e| Error::DegenerateSample(e.to_string()))?;
    fit_family(values, family)
}

/// Fits a given family.
pub fn fit_family(values: &[f64], family: Family) -> Result<JohnsonFit> {
    check_sample(values)?;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);

    let candidates = [
        percentile_start(&sorted, family),
        moment_start(&sorted, family),
    ];
    let (start, start_ll) = candidates
        .into_iter()
        .flatten()
        .map(|p| (p, log_likelihood(&p, &sorted)))
        .filter(|(_, ll)| ll.is_finite())
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::DegenerateSample(format!("no valid {family} starting point")))?;

    let space = Space::new(&sorted, family);
    let n = sorted.len() as f64;
    let objective = |theta: &[f64]| match space.params(theta) {
        Some(p) => -log_likelihood(&p, &sorted) / n,
        None => f64::INFINITY,
    };
    let x0 = space.theta(&start);
    let result = nelder_mead(
        objective,
        &x0,
        &space.steps(&start),
        SimplexOptions::default(),
    );
    let refined = space.params(&result.x).unwrap_or(start);
    let refined_ll = log_likelihood(&refined, &sorted);
    let (params, ll) = if refined_ll >= start_ll {
        (refined, refined_ll)
    } else {
        (start, start_ll)
    };
    if !result.converged {
        log::warn!(
            "{family} fit stopped after {} simplex iterations without converging",
            result.iterations
        );
    }
    Ok(JohnsonFit {
        params,
        ks_statistic: ks_statistic(&params, &sorted),
        log_likelihood: ll,
        initial_log_likelihood: start_ll,
        iterations: result.iterations,
        converged: result.converged,
    })
}

fn check_sample(values: &[f64]) -> Result<()> {
    if values.len() < MIN_FIT_SAMPLES {
        return Err(Error::DegenerateSample(format!(
            "need at least {MIN_FIT_SAMPLES} values, got {}",
            values.len()
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateSample("non-finite value".into()));
    }
    let m = chunked_moments(values, DEFAULT_CHUNK_SIZE);
    if m.variance <= (1e-12 * m.mean.abs()).powi(2) {
        return Err(Error::DegenerateSample("zero variance".into()));
    }
    Ok(())
}

fn log_likelihood(p: &JohnsonParams, values: &[f64]) -> f64 {
    values.iter().map(|&x| p.log_pdf(x)).sum()
}

/// Two-sided KS distance of a sorted sample.
pub(crate) fn ks_statistic(p: &JohnsonParams, sorted: &[f64]) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = p.cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Linear-interpolation quantile of a sorted sample.
fn empirical_quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn percentile_start(sorted: &[f64], family: Family) -> Option<JohnsonParams> {
    let z = PERCENTILE_Z;
    let q = |s: f64| empirical_quantile(sorted, normal_cdf(s * z));
    let (x3m, xm, xp, x3p) = (q(-3.0), q(-1.0), q(1.0), q(3.0));
    let m = x3p - xp;
    let n = xm - x3m;
    let p = xp - xm;
    if !(m > 0.0 && n > 0.0 && p > 0.0) {
        return None;
    }
    let (mp, np) = (m / p, n / p);
    let mid = 0.5 * (xp + xm);
    let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
    let params = match family {
        Family::SU => {
            let r = mp * np - 1.0;
            if r <= 0.0 {
                return None;
            }
            let delta = 2.0 * z / (0.5 * (mp + np)).acosh();
            let gamma = delta * ((np - mp) / (2.0 * r.sqrt())).asinh();
            let lambda = 2.0 * p * r.sqrt() / ((mp + np - 2.0) * (mp + np + 2.0).sqrt());
            let xi = mid + p * (np - mp) / (2.0 * (mp + np - 2.0));
            JohnsonParams::new(family, gamma, delta, xi, lambda).ok()?
        }
        Family::SB => {
            let (pm, pn) = (p / m, p / n);
            let r = pm * pn - 1.0;
            if r <= 0.0 {
                return None;
            }
            let a = (1.0 + pm) * (1.0 + pn);
            let delta = z / (0.5 * a.sqrt()).acosh();
            let gamma = delta * ((pn - pm) * (a - 4.0).sqrt() / (2.0 * r)).asinh();
            let lambda = p * ((a - 2.0).powi(2) - 4.0).sqrt() / r;
            let xi = mid - 0.5 * lambda + p * (pn - pm) / (2.0 * r);
            let params = JohnsonParams::new(family, gamma, delta, xi, lambda).ok()?;
            if !(xi < min && xi + lambda > max) {
                return None;
            }
            params
        }
        Family::SL => {
            if mp <= 1.0 {
                return None;
            }
            let delta = 2.0 * z / mp.ln();
            let gamma = delta * ((mp - 1.0) / (p * mp.sqrt())).ln();
            let xi = mid - 0.5 * p * (mp + 1.0) / (mp - 1.0);
            if xi >= min {
                return None;
            }
            JohnsonParams::new(family, gamma, delta, xi, 1.0).ok()?
        }
    };
    Some(params)
}

/// Fixes location and scale from the sample range or quartiles and picks
/// gamma and delta so the transformed sample has mean 0 and variance 1.
fn moment_start(sorted: &[f64], family: Family) -> Option<JohnsonParams> {
    let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
    let range = max - min;
    let (xi, lambda) = match family {
        Family::SU => {
            let iqr = empirical_quantile(sorted, 0.75) - empirical_quantile(sorted, 0.25);
            (empirical_quantile(sorted, 0.5), 0.5 * iqr.max(1e-3 * range))
        }
        Family::SB => (min - 0.05 * range, 1.1 * range),
        Family::SL => (min - 0.05 * range, 1.0),
    };
    let probe = JohnsonParams::new(family, 0.0, 1.0, xi, lambda).ok()?;
    let y: Vec<f64> = sorted.iter().map(|&x| probe.z_score(x)).collect();
    let m = chunked_moments(&y, DEFAULT_CHUNK_SIZE);
    if !(m.variance > 0.0 && m.mean.is_finite()) {
        return None;
    }
    let delta = 1.0 / m.variance.sqrt();
    JohnsonParams::new(family, -m.mean * delta, delta, xi, lambda).ok()
}

/// Unconstrained coordinates for the simplex search.
///
/// * SU: `[gamma, ln delta, xi, ln lambda]`
/// * SB: `[gamma, ln delta, ln(min - xi), ln(xi + lambda - max)]`
/// * SL: `[gamma, ln delta, ln(min - xi)]` with `lambda = 1`
///
/// The SB and SL forms keep every sample point inside the support.
struct Space {
    family: Family,
    min: f64,
    max: f64,
}

impl Space {
    fn new(sorted: &[f64], family: Family) -> Self {
        Space {
            family,
            min: sorted[0],
            max: sorted[sorted.len() - 1],
        }
    }

    fn theta(&self, p: &JohnsonParams) -> Vec<f64> {
        let (g, ld) = (p.gamma(), p.delta().ln());
        match self.family {
            Family::SU => vec![g, ld, p.xi(), p.lambda().ln()],
            Family::SB => vec![
                g,
                ld,
                (self.min - p.xi()).ln(),
                (p.xi() + p.lambda() - self.max).ln(),
            ],
            Family::SL => vec![g, ld, (self.min - p.xi()).ln()],
        }
    }

    fn steps(&self, p: &JohnsonParams) -> Vec<f64> {
        match self.family {
            Family::SU => vec![0.1, 0.1, 0.1 * p.lambda(), 0.1],
            Family::SB => vec![0.1, 0.1, 0.5, 0.5],
            Family::SL => vec![0.1, 0.1, 0.5],
        }
    }

    fn params(&self, t: &[f64]) -> Option<JohnsonParams> {
        let (gamma, delta) = (t[0], t[1].exp());
        let (xi, lambda) = match self.family {
            Family::SU => (t[2], t[3].exp()),
            Family::SB => {
                let xi = self.min - t[2].exp();
                (xi, self.max + t[3].exp() - xi)
            }
            Family::SL => (self.min - t[2].exp(), 1.0),
        };
        JohnsonParams::new(self.family, gamma, delta, xi, lambda).ok()
    }
}

pub const FIT_CSV_HEADER: &str = "n,family,gamma,delta,xi,lambda,ks";

/// Writes one CSV row per `(n, fit)`.
pub fn write_fits_csv<W: Write>(mut out: W, fits: &[(usize, JohnsonFit)]) -> Result<()> {
    writeln!(out, "{FIT_CSV_HEADER}")?;
    for (n, f) in fits {
        let p = &f.params;
        writeln!(
            out,
            "{n},{},{},{},{},{},{}",
            p.family(),
            fmt_sig12(p.gamma()),
            fmt_sig12(p.delta()),
            fmt_sig12(p.xi()),
            fmt_sig12(p.lambda()),
            fmt_sig12(f.ks_statistic)
        )?;
    }
    Ok(())
}
