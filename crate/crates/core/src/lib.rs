//! Statistics of differences of Riemann zeta zero ordinates: zero
//! computation and file formats, per-offset delta moments and histograms,
//! Johnson curve fitting, and detection of low zeros from the variance of
//! high-zero differences.

// `!(x > 0.0)` is used on purpose so NaN fails validation too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod delta;
pub mod error;
pub mod johnson;
pub mod numeric;
pub mod stats;
pub mod zeros;

pub use error::{Error, Result};
