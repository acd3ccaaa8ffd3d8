//! Zero ordinates: storage, file formats and local computation.
//!
//! Ordinates at large heights do not fit in a double, so a [`ZeroSet`]
//! keeps an exact decimal base and stores each zero as a double offset from
//! it. Everything downstream works on offsets only.

mod compute;
mod format;
mod riemann_siegel;

use std::fmt;
use std::str::FromStr;

pub use compute::{compute_zeros, MAX_COMPUTE_INDEX};
pub use format::{parse_zeros, write_zeros, FormatKind, Header};
pub use riemann_siegel::{gram_point, riemann_siegel_theta, riemann_siegel_z, z_function};

use crate::error::{Error, Result};

/// A non-negative decimal number kept exactly as written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decimal(String);

impl Decimal {
    pub fn zero() -> Self {
        Decimal("0".to_string())
    }

    pub fn is_zero(&self) -> bool {
        let mantissa = self.0.split(['e', 'E']).next().unwrap_or("");
        mantissa.bytes().all(|b| !b.is_ascii_digit() || b == b'0')
    }

    /// Nearest double. Loses digits beyond ~16 significant figures.
    pub fn to_f64(&self) -> f64 {
        self.0.parse().expect("validated decimal")
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl FromStr for Decimal {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if is_decimal_literal(s, false) {
            Ok(Decimal(s.to_string()))
        } else {
            Err(format!("not a non-negative decimal number: {s:?}"))
        }
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Accepts `digits[.digits][(e|E)[+|-]digits]`, optionally with a leading `-`.
pub(crate) fn is_decimal_literal(s: &str, allow_minus: bool) -> bool {
    let b = s.as_bytes();
    let mut i = 0;
    if allow_minus && b.first() == Some(&b'-') {
        i = 1;
    }
    let digits = |i: &mut usize| {
        let start = *i;
        while *i < b.len() && b[*i].is_ascii_digit() {
            *i += 1;
        }
        *i > start
    };
    if !digits(&mut i) {
        return false;
    }
    if i < b.len() && b[i] == b'.' {
        i += 1;
        if !digits(&mut i) {
            return false;
        }
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        i += 1;
        if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
            i += 1;
        }
        if !digits(&mut i) {
            return false;
        }
    }
    i == b.len()
}

/// An ordered block of consecutive zero ordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSet {
    base: Decimal,
    offsets: Vec<f64>,
    start_index: u128,
}

impl ZeroSet {
    /// Builds a zero set, checking that offsets are finite and strictly
    /// increasing and that the index is 1-based.
    pub fn new(base: Decimal, offsets: Vec<f64>, start_index: u128) -> Result<Self> {
        if start_index == 0 {
            return Err(Error::param("start_index is 1-based"));
        }
        if let Some(bad) = offsets.iter().position(|v| !v.is_finite()) {
            return Err(Error::param(format!("offset {bad} is not finite")));
        }
        if let Some(i) = offsets.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::Monotonicity { line: i + 2 });
        }
        Ok(ZeroSet {
            base,
            offsets,
            start_index,
        })
    }

    /// Zero set with base 0, i.e. offsets are the ordinates themselves.
    pub fn from_ordinates(ordinates: Vec<f64>, start_index: u128) -> Result<Self> {
        Self::new(Decimal::zero(), ordinates, start_index)
    }

    pub fn base(&self) -> &Decimal {
        &self.base
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn start_index(&self) -> u128 {
        self.start_index
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    /// Approximate absolute ordinate of the `i`-th zero in the block.
    pub fn ordinate(&self, i: usize) -> f64 {
        self.base.to_f64() + self.offsets[i]
    }

    /// Keeps only the first `count` zeros.
    pub fn truncated(mut self, count: usize) -> Self {
        self.offsets.truncate(count);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_grammar() {
        for ok in ["0", "14.134725", "1.3066e22", "7E+3", "10.0e-2"] {
            assert!(ok.parse::<Decimal>().is_ok(), "{ok}");
        }
        for bad in [
            "", "-1", ".5", "5.", "1e", "inf", "NaN", "1.2.3", " 1", "0x10", "1e+",
        ] {
            assert!(bad.parse::<Decimal>().is_err(), "{bad}");
        }
        assert!(is_decimal_literal("-0.25", true));
        assert!(Decimal::zero().is_zero());
        assert!("0.000e5".parse::<Decimal>().unwrap().is_zero());
        assert!(!"1.3066e22".parse::<Decimal>().unwrap().is_zero());
    }

    #[test]
    fn zero_set_rejects_bad_offsets() {
        assert!(matches!(
            ZeroSet::from_ordinates(vec![1.0, 2.0, 2.0], 1),
            Err(Error::Monotonicity { line: 3 })
        ));
        assert!(ZeroSet::from_ordinates(vec![1.0, f64::INFINITY], 1).is_err());
        assert!(ZeroSet::from_ordinates(vec![1.0, 2.0], 0).is_err());
    }

    #[test]
    fn ordinate_adds_base() {
        let z = ZeroSet::new("100.5".parse().unwrap(), vec![0.25, 1.0], 7).unwrap();
        assert_eq!(z.ordinate(1), 101.5);
        assert_eq!(z.start_index(), 7);
        assert_eq!(z.truncated(1).len(), 1);
    }
}
