//! The Johnson system: a standard normal `z` is mapped to `x` through
//! `z = gamma + delta * ln f(u)`, `u = (x - xi) / lambda`, with
//!
//! * SL: `f(u) = u`, support `x > xi`
//! * SU: `f(u) = u + sqrt(u^2 + 1)`, support the real line
//! * SB: `f(u) = u / (1 - u)`, support `xi < x < xi + lambda`
//!
//! The density is `phi(z) * delta * |f'(u) / f(u)| / lambda`.

mod fit;
mod simplex;

use std::fmt;
use std::str::FromStr;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::delta::Moments;
use crate::error::{Error, Result};
use crate::numeric::{normal_cdf, normal_quantile, simpson, LN_SQRT_2PI};

pub use fit::{fit, fit_family, write_fits_csv, JohnsonFit, FIT_CSV_HEADER};
pub use simplex::{nelder_mead, Simplex, SimplexOptions};

/// Distance below which a moment pair counts as lying on the SL curve.
pub const SL_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    SL,
    SU,
    SB,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::SL => "SL",
            Family::SU => "SU",
            Family::SB => "SB",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "SL" => Ok(Family::SL),
            "SU" => Ok(Family::SU),
            "SB" => Ok(Family::SB),
            _ => Err(Error::param(format!("unknown Johnson family {s:?}"))),
        }
    }
}

/// A validated Johnson distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JohnsonParams {
    family: Family,
    gamma: f64,
    delta: f64,
    xi: f64,
    lambda: f64,
}

impl JohnsonParams {
    pub fn new(family: Family, gamma: f64, delta: f64, xi: f64, lambda: f64) -> Result<Self> {
        if ![gamma, delta, xi, lambda].iter().all(|v| v.is_finite()) {
            return Err(Error::param("Johnson parameters must be finite"));
        }
        if delta <= 0.0 {
            return Err(Error::param(format!("delta must be positive, got {delta}")));
        }
        if lambda <= 0.0 {
            return Err(Error::param(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        Ok(JohnsonParams {
            family,
            gamma,
            delta,
            xi,
            lambda,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Open support interval.
    pub fn support(&self) -> (f64, f64) {
        match self.family {
            Family::SU => (f64::NEG_INFINITY, f64::INFINITY),
            Family::SL => (self.xi, f64::INFINITY),
            Family::SB => (self.xi, self.xi + self.lambda),
        }
    }

    /// `ln f(u)` and `ln |d ln f / du|` at `x`, or `None` outside the support.
    fn transform(&self, x: f64) -> Option<(f64, f64)> {
        let u = (x - self.xi) / self.lambda;
        match self.family {
            Family::SU => Some((u.asinh(), -u.hypot(1.0).ln())),
            Family::SL => (u > 0.0).then(|| {
                let lu = u.ln();
                (lu, -lu)
            }),
            Family::SB => {
                let below = x - self.xi;
                let above = self.xi + self.lambda - x;
                (below > 0.0 && above > 0.0).then(|| {
                    let (lu, l1u) = ((below / self.lambda).ln(), (above / self.lambda).ln());
                    (lu - l1u, -lu - l1u)
                })
            }
        }
    }

    /// Normal score `gamma + delta * ln f(u)`; infinite outside the support.
    pub fn z_score(&self, x: f64) -> f64 {
        match self.transform(x) {
            Some((lf, _)) => self.gamma + self.delta * lf,
            None => {
                let (lo, _) = self.support();
                if x <= lo {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        match self.transform(x) {
            Some((lf, ljac)) => {
                let z = self.gamma + self.delta * lf;
                -LN_SQRT_2PI - 0.5 * z * z + self.delta.ln() - self.lambda.ln() + ljac
            }
            None => f64::NEG_INFINITY,
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.log_pdf(x).exp()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        normal_cdf(self.z_score(x))
    }

    /// `x` at normal score `z`.
    pub fn from_z(&self, z: f64) -> f64 {
        let w = (z - self.gamma) / self.delta;
        let u = match self.family {
            Family::SU => w.sinh(),
            Family::SL => w.exp(),
            Family::SB => 0.5 * (1.0 + (0.5 * w).tanh()),
        };
        self.xi + self.lambda * u
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain(format!(
                "quantile probability {p} not in (0, 1)"
            )));
        }
        Ok(self.from_z(normal_quantile(p)))
    }

    /// `count` draws from a ChaCha8 stream seeded with `seed`.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let p: f64 = rng.sample(Open01);
                self.from_z(normal_quantile(p))
            })
            .collect()
    }

    /// Mean, variance, skewness and kurtosis by quadrature over the normal
    /// score. `count` is left at 0.
    pub fn moments(&self) -> Moments {
        // The fourth-moment integrand of SU/SL peaks near |z| = 4 / delta.
        let half = 14.0 + 4.0 / self.delta;
        let intervals = (400.0 * half) as usize;
        let (a, b) = (self.gamma - half, self.gamma + half);
        let weight = |z: f64| (-LN_SQRT_2PI - 0.5 * z * z).exp();
        let mean = simpson(|z| self.from_z(z) * weight(z), a, b, intervals);
        let central = |k: i32| {
            simpson(
                |z| (self.from_z(z) - mean).powi(k) * weight(z),
                a,
                b,
                intervals,
            )
        };
        let (m2, m3, m4) = (central(2), central(3), central(4));
        Moments {
            count: 0,
            mean,
            variance: m2,
            skewness: m3 / m2.powf(1.5),
            kurtosis: m4 / (m2 * m2),
        }
    }
}

/// Point of the SL curve in the (skewness^2, kurtosis) plane for shape
/// `delta_shape`.
pub fn sl_boundary(delta_shape: f64) -> Result<(f64, f64)> {
    if !(delta_shape > 0.0 && delta_shape.is_finite()) {
        return Err(Error::param(format!(
            "delta must be positive, got {delta_shape}"
        )));
    }
    Ok(sl_point((1.0 / (delta_shape * delta_shape)).exp()))
}

fn sl_point(omega: f64) -> (f64, f64) {
    let skew_sq = (omega - 1.0) * (omega + 2.0) * (omega + 2.0);
    let w2 = omega * omega;
    (skew_sq, w2 * w2 + 2.0 * w2 * omega + 3.0 * w2 - 3.0)
}

/// Kurtosis of the SL curve at a given squared skewness.
pub fn sl_kurtosis_at(skew_sq: f64) -> f64 {
    // (w - 1)(w + 2)^2 = b1 is a depressed cubic in w + 1.
    let b1 = skew_sq.max(0.0);
    let root = (b1 + 0.25 * b1 * b1).sqrt();
    let omega = (1.0 + 0.5 * b1 + root).cbrt() + (1.0 + 0.5 * b1 - root).cbrt() - 1.0;
    sl_point(omega.max(1.0)).1
}

/// Johnson family whose region contains the moment pair: below the SL curve
/// is SB, above is SU.
pub fn select_family(skewness: f64, kurtosis: f64) -> Result<Family> {
    if !(skewness.is_finite() && kurtosis > 1.0 + skewness * skewness) {
        return Err(Error::InfeasibleMoments { skewness, kurtosis });
    }
    let gap = kurtosis - sl_kurtosis_at(skewness * skewness);
    Ok(if gap.abs() <= SL_TOLERANCE {
        Family::SL
    } else if gap < 0.0 {
        Family::SB
    } else {
        Family::SU
    })
}
