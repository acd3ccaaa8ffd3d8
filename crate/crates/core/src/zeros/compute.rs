//! Locating zeros on the critical line by scanning Gram intervals.
//!
//! Zeros are counted between good Gram points (those with
//! `(-1)^k Z(g_k) > 0`), where the counting estimate says exactly `k + 1`
//! zeros lie below `g_k`. Each Gram block between consecutive good points
//! must then hold as many sign changes as it has intervals; blocks that
//! come up short are trisected until the missing pairs appear. This is the
//! usual heuristic, not a Turing-style proof of completeness.

use rayon::prelude::*;

use super::riemann_siegel::{gram_point_f, z_function};
use super::ZeroSet;
use crate::error::{Error, Result};
use crate::numeric::brent_root;

/// Largest zero index `compute_zeros` will produce. Rosser's rule, which the
/// block counting relies on, first fails near Gram index 1.4e7.
pub const MAX_COMPUTE_INDEX: u128 = 10_000_000;

const MAX_SUBDIVISION_DEPTH: u32 = 20;
const MAX_BLOCK_SAMPLES: usize = 100_000;
const ROOT_TOLERANCE: f64 = 5e-10;

/// Sample point on the t axis. Gram index -1 stands for t = 10, below the
/// first zero.
#[derive(Clone, Copy, Debug)]
struct Sample {
    t: f64,
    z: f64,
}

fn gram_sample(k: i64) -> Sample {
    let t = if k < 0 { 10.0 } else { gram_point_f(k as f64) };
    Sample {
        t,
        z: z_function(t),
    }
}

fn is_good(k: i64, z: f64) -> bool {
    if k < 0 {
        return true;
    }
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    sign * z > 0.0
}

fn sign_changes(samples: &[Sample]) -> usize {
    samples
        .windows(2)
        .filter(|w| (w[0].z > 0.0) != (w[1].z > 0.0))
        .count()
}

/// Finds the brackets of all zeros inside one Gram block.
fn scan_block(mut samples: Vec<Sample>, expected: usize) -> Result<Vec<(Sample, Sample)>> {
    let mut depth = 0;
    loop {
        let found = sign_changes(&samples);
        if found == expected {
            break;
        }
        let (from, to) = (samples[0].t, samples[samples.len() - 1].t);
        if found > expected
            || depth == MAX_SUBDIVISION_DEPTH
            || samples.len() * 3 > MAX_BLOCK_SAMPLES
        {
            return Err(Error::IncompleteScan {
                from,
                to,
                expected,
                found,
            });
        }
        let mut refined = Vec::with_capacity(samples.len() * 3);
        for w in samples.windows(2) {
            refined.push(w[0]);
            let h = (w[1].t - w[0].t) / 3.0;
            for j in 1..3 {
                let t = w[0].t + h * j as f64;
                refined.push(Sample {
                    t,
                    z: z_function(t),
                });
            }
        }
        refined.push(samples[samples.len() - 1]);
        samples = refined;
        depth += 1;
    }
    Ok(samples
        .windows(2)
        .filter(|w| (w[0].z > 0.0) != (w[1].z > 0.0))
        .map(|w| (w[0], w[1]))
        .collect())
}

fn refine(bracket: (Sample, Sample)) -> f64 {
    let (a, b) = bracket;
    if a.z == 0.0 {
        return a.t;
    }
    brent_root(z_function, a.t, b.t, ROOT_TOLERANCE)
}

/// Ordinates of zeros number `start_index .. start_index + count - 1`.
pub fn compute_zeros(count: usize, start_index: u128) -> Result<ZeroSet> {
    if count == 0 {
        return Err(Error::param("count must be positive"));
    }
    if start_index == 0 {
        return Err(Error::param("start_index is 1-based"));
    }
    let last = start_index
        .checked_add(count as u128 - 1)
        .filter(|&l| l <= MAX_COMPUTE_INDEX)
        .ok_or_else(|| {
            Error::param(format!(
                "zero indices above {MAX_COMPUTE_INDEX} are out of reach of double precision scanning"
            ))
        })?;
    let first = start_index as i64;
    let last = last as i64;

    // Zero m usually sits in (g_{m-2}, g_{m-1}]; pad both ends and move out
    // to good Gram points.
    let mut lo = (first - 4).max(-1);
    let mut lo_sample = gram_sample(lo);
    while !is_good(lo, lo_sample.z) {
        lo -= 1;
        lo_sample = gram_sample(lo);
    }
    let mut hi = last + 2;
    let mut hi_sample = gram_sample(hi);
    while !is_good(hi, hi_sample.z) {
        hi += 1;
        hi_sample = gram_sample(hi);
    }

    let gram: Vec<Sample> = (lo..=hi).into_par_iter().map(gram_sample).collect();
    let good: Vec<usize> = (0..gram.len())
        .filter(|&i| is_good(lo + i as i64, gram[i].z))
        .collect();

    let blocks: Vec<Vec<(Sample, Sample)>> = good
        .par_windows(2)
        .map(|w| scan_block(gram[w[0]..=w[1]].to_vec(), w[1] - w[0]))
        .collect::<Result<_>>()?;
    let brackets: Vec<(Sample, Sample)> = blocks.into_iter().flatten().collect();
    let roots: Vec<f64> = brackets.into_par_iter().map(refine).collect();

    // N(g_lo) = lo + 1, so the first root found is zero number lo + 2.
    let skip = (first - (lo + 2)) as usize;
    let ordinates: Vec<f64> = roots.into_iter().skip(skip).take(count).collect();
    if ordinates.len() != count {
        return Err(Error::IncompleteScan {
            from: lo_sample.t,
            to: hi_sample.t,
            expected: count,
            found: ordinates.len(),
        });
    }
    log::debug!(
        "computed zeros {}..={} from Gram points {lo}..={hi}",
        start_index,
        last
    );
    ZeroSet::from_ordinates(ordinates, start_index)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_zero() {
        let z = compute_zeros(1, 1).unwrap();
        assert!((z.offsets()[0] - 14.134_725_141_734_693).abs() < 1e-8);
    }

    #[test]
    fn rejects_bad_ranges() {
        assert!(compute_zeros(0, 1).is_err());
        assert!(compute_zeros(1, 0).is_err());
        assert!(compute_zeros(10, MAX_COMPUTE_INDEX).is_err());
    }

    #[test]
    fn windows_agree_with_a_single_scan() {
        let all = compute_zeros(60, 1).unwrap();
        let part = compute_zeros(15, 31).unwrap();
        assert_eq!(part.start_index(), 31);
        for (i, v) in part.offsets().iter().enumerate() {
            assert!((v - all.offsets()[30 + i]).abs() < 1e-9);
        }
    }
}
