//! Desk-scale acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.
//!
//! The real-zero criteria share one block of 100 000 zeros starting at
//! index 5 000 000 (ordinates near 2.45e6), computed once.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

use zdl_core::analysis::{
    detect_zeros_end_to_end, empirical_pair_correlation, offsets_spanning, pair_correlation_mae,
    plane_report, skewness_profile, unfold, DetectionOptions,
};
use zdl_core::delta::{sweep, MomentCurve};
use zdl_core::johnson::{fit, Family, JohnsonParams};
use zdl_core::numeric::simpson;
use zdl_core::zeros::{compute_zeros, parse_zeros, write_zeros, FormatKind, ZeroSet};

const START_INDEX: u128 = 5_000_000;
const WINDOW: usize = 100_000;

struct Outcome {
    pass: bool,
    detail: String,
}

/// Collects failed checks with their explanations.
#[derive(Default)]
struct Checks {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if ok {
            self.notes.push(what);
        } else {
            self.failures.push(what);
        }
    }

    fn outcome(self) -> Outcome {
        if self.failures.is_empty() {
            Outcome {
                pass: true,
                detail: self.notes.join("; "),
            }
        } else {
            Outcome {
                pass: false,
                detail: format!(
                    "failed: {}; passed: {}",
                    self.failures.join("; "),
                    self.notes.join("; ")
                ),
            }
        }
    }
}

struct Desk {
    zeros: ZeroSet,
    compute_time: Duration,
    /// Low zeros covering every mean(delta(n)) of the sweep.
    low: Vec<f64>,
    curve: MomentCurve,
}

fn load_desk() -> Desk {
    let t = Instant::now();
    let zeros = compute_zeros(WINDOW, START_INDEX).expect("desk-scale zeros");
    let compute_time = t.elapsed();
    let low_set = compute_zeros(300, 1).expect("low zeros");
    let low = (0..low_set.len()).map(|i| low_set.ordinate(i)).collect();
    let curve = sweep(&zeros, 1, 999).expect("sweep");
    Desk {
        zeros,
        compute_time,
        low,
        curve,
    }
}

fn zdl(dir: &Path, args: &[&str]) -> i32 {
    let out = Command::new(env!("CARGO_BIN_EXE_zdl"))
        .args(args)
        .current_dir(dir)
        .env_remove("ZDL_OUT_DIR")
        .env("RUST_LOG", "warn")
        .output()
        .expect("zdl runs");
    if !out.status.success() {
        eprintln!("zdl {args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    out.status.code().unwrap_or(-1)
}

fn read_ordinates(path: &Path) -> Vec<f64> {
    let file = fs::File::open(path).expect("zero file");
    let zs = parse_zeros(std::io::BufReader::new(file), FormatKind::PlainList)
        .expect("zero file parses");
    (0..zs.len()).map(|i| zs.ordinate(i)).collect()
}

fn criterion_1() -> Outcome {
    let dir = TempDir::new().unwrap();
    let t = Instant::now();
    let code = zdl(
        dir.path(),
        &["compute-zeros", "--count", "1000", "--out", "zeros.txt"],
    );
    let elapsed = t.elapsed();
    let mut c = Checks::default();
    c.check(code == 0, format!("exit {code}"));
    if code != 0 {
        return c.outcome();
    }
    let got = read_ordinates(&dir.path().join("zeros.txt"));
    let table = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/zeros_1000.txt");
    let want = read_ordinates(&table);
    c.check(
        got.len() == 1000 && want.len() == 1000,
        format!("{} zeros", got.len()),
    );
    let worst = got
        .iter()
        .zip(&want)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    c.check(worst < 1e-6, format!("max |error| {worst:.2e} (< 1e-6)"));
    for spot in [32.935, 37.586, 40.919, 43.327] {
        let found = got.iter().any(|z| (z - spot).abs() < 5e-4);
        c.check(found, format!("zero at {spot}"));
    }
    c.check(
        elapsed < Duration::from_secs(60),
        format!("{:.2} s (< 60 s)", elapsed.as_secs_f64()),
    );
    c.outcome()
}

fn criterion_2(d: &Desk) -> Outcome {
    let t = Instant::now();
    let (n_from, n_to) = offsets_spanning(&d.zeros, 20.0, 50.0, 1).expect("offsets");
    let det = detect_zeros_end_to_end(&d.zeros, n_from, n_to, &d.low, DetectionOptions::default())
        .expect("detect");
    let elapsed = t.elapsed() + d.compute_time;
    let mut c = Checks::default();
    let span = (
        det.second_derivative.xs()[0],
        *det.second_derivative.xs().last().unwrap(),
    );
    c.check(
        span.0 <= 20.0 && span.1 >= 50.0,
        format!("n = {n_from}..={n_to} spans [{:.2}, {:.2}]", span.0, span.1),
    );
    for &z in d.low.iter().filter(|&&z| (25.0..=45.0).contains(&z)) {
        match det.report.matches.iter().find(|m| m.reference == z) {
            Some(m) if m.abs_error <= 0.1 => c.check(true, format!("{z:.3} at {:.3}", m.detected)),
            Some(m) => c.check(false, format!("{z:.3} off by {:.3}", m.abs_error)),
            None => c.check(false, format!("{z:.3} unmatched")),
        }
    }
    c.check(
        det.report.unmatched_detected.is_empty(),
        format!("{} false positives", det.report.unmatched_detected.len()),
    );
    c.check(
        elapsed < Duration::from_secs(300),
        format!(
            "{:.1} s including zero computation (< 300 s)",
            elapsed.as_secs_f64()
        ),
    );
    c.outcome()
}

fn criterion_3(d: &Desk) -> Outcome {
    let profile = skewness_profile(&d.curve, &d.low);
    let mut c = Checks::default();
    let worst = profile
        .crossings
        .iter()
        .max_by(|a, b| a.change().total_cmp(&b.change()))
        .expect("crossings");
    c.check(
        profile.crossings.len() > 100,
        format!("{} zeros inside the sweep span", profile.crossings.len()),
    );
    let rising: Vec<String> = profile
        .crossings
        .iter()
        .filter(|x| x.change() >= 0.02)
        .map(|x| format!("{:.3}", x.zero))
        .collect();
    c.check(
        rising.is_empty(),
        format!(
            "largest change {:+.4} at {:.3}; rising at {rising:?}",
            worst.change(),
            worst.zero
        ),
    );
    let at = |z: f64| profile.crossings.iter().find(|x| (x.zero - z).abs() < 1e-3);
    if let Some(x) = at(37.586) {
        c.check(
            x.skew_before > 0.0 && x.skew_after < 0.0,
            format!("37.586: {:+.3} -> {:+.3}", x.skew_before, x.skew_after),
        );
    } else {
        c.check(false, "37.586 not in span");
    }
    if let Some(x) = at(40.919) {
        c.check(
            x.skew_after < 0.0,
            format!("40.919: {:+.3} -> {:+.3}", x.skew_before, x.skew_after),
        );
    }
    for z in [43.327, 79.337] {
        match at(z) {
            Some(x) => c.check(
                x.skew_before < 0.0 && x.skew_after < x.skew_before,
                format!(
                    "{z}: {:+.3} -> {:+.3} (negative, decreasing)",
                    x.skew_before, x.skew_after
                ),
            ),
            None => c.check(false, format!("{z} not in span")),
        }
    }
    if let Some(x) = at(75.705) {
        c.check(
            x.skew_after > 0.0 && x.skew_after < x.skew_before,
            format!(
                "75.705: {:+.3} -> {:+.3} (stays positive, decreasing)",
                x.skew_before, x.skew_after
            ),
        );
    }
    c.outcome()
}

fn random_params(rng: &mut ChaCha8Rng, family: Family) -> JohnsonParams {
    let gamma = rng.random_range(-2.0..2.0);
    let delta = rng.random_range(0.5..3.0);
    let xi = rng.random_range(-5.0..5.0);
    let lambda = if family == Family::SL {
        1.0
    } else {
        rng.random_range(0.5..5.0)
    };
    JohnsonParams::new(family, gamma, delta, xi, lambda).unwrap()
}

/// Simpson quadrature of the density over pieces of equal normal-score
/// width out to |z| = 8.5, beyond which the mass is below 1e-16.
fn mass(p: &JohnsonParams) -> f64 {
    let pieces = 400;
    (0..pieces)
        .map(|k| {
            let za = -8.5 + 17.0 * k as f64 / pieces as f64;
            let zb = -8.5 + 17.0 * (k + 1) as f64 / pieces as f64;
            simpson(|x| p.pdf(x), p.from_z(za), p.from_z(zb), 32)
        })
        .sum()
}

fn criterion_4() -> Outcome {
    let mut c = Checks::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut worst_mass, mut worst_trip) = (0.0f64, 0.0f64);
    for family in [Family::SU, Family::SB, Family::SL] {
        for _ in 0..100 {
            let p = random_params(&mut rng, family);
            worst_mass = worst_mass.max((mass(&p) - 1.0).abs());
            for k in 1..200 {
                let q = k as f64 / 200.0;
                let x = p.quantile(q).unwrap();
                worst_trip = worst_trip.max((p.cdf(x) - q).abs());
                let back = p.quantile(p.cdf(x)).unwrap();
                worst_trip = worst_trip.max((back - x).abs() / (1.0 + x.abs()));
            }
        }
    }
    c.check(
        worst_mass < 1e-6,
        format!("(a) max |mass - 1| {worst_mass:.1e} over 300 parameter sets"),
    );
    c.check(
        worst_trip < 1e-8,
        format!("(b) max roundtrip error {worst_trip:.1e}"),
    );
    for (family, truth, seed) in [
        (Family::SU, [-1.0, 2.0, 10.0, 3.0], 41),
        (Family::SB, [0.5, 1.5, 2.0, 6.0], 42),
    ] {
        let p = JohnsonParams::new(family, truth[0], truth[1], truth[2], truth[3]).unwrap();
        let f = fit(&p.sample(100_000, seed)).expect("fit");
        let got = [
            f.params.gamma(),
            f.params.delta(),
            f.params.xi(),
            f.params.lambda(),
        ];
        let rel = got
            .iter()
            .zip(&truth)
            .map(|(g, t)| ((g - t) / t).abs())
            .fold(0.0, f64::max);
        c.check(
            f.params.family() == family && rel < 0.05 && f.ks_statistic < 0.01,
            format!(
                "(c) {family} fitted as {} with max relative error {:.2}% and KS {:.4}",
                f.params.family(),
                100.0 * rel,
                f.ks_statistic
            ),
        );
    }
    c.outcome()
}

fn criterion_5(d: &Desk) -> Outcome {
    let report = plane_report(&[("desk", &d.curve)]);
    let group = &report.groups[0];
    let mut c = Checks::default();
    let pearson = d
        .curve
        .entries
        .iter()
        .all(|e| e.kurtosis > 1.0 + e.skewness * e.skewness);
    c.check(
        pearson && group.dropped == 0,
        "kurtosis > 1 + skewness^2 at every n",
    );
    let rest: Vec<_> = group.points.iter().filter(|p| p.n >= 2).collect();
    let below = rest.iter().filter(|p| p.kurtosis < 3.0).count() as f64 / rest.len() as f64;
    c.check(
        below > 0.7,
        format!(
            "{:.1}% of n = 2..999 below kurtosis 3 (> 70%)",
            100.0 * below
        ),
    );
    let sep = group.separation(1).expect("separation");
    c.check(
        sep > 5.0,
        format!("delta(1) separation {sep:.2} cluster SDs (> 5)"),
    );
    c.outcome()
}

fn criterion_6(d: &Desk) -> Outcome {
    let u = unfold(&d.zeros).expect("unfold");
    let curve = empirical_pair_correlation(&u, 3.0, 0.05).expect("pair correlation");
    let mae = pair_correlation_mae(&curve);
    let mut c = Checks::default();
    c.check(curve.len() == 60, format!("{} bins", curve.len()));
    c.check(mae < 0.05, format!("MAE {mae:.4} (< 0.05)"));
    c.outcome()
}

fn csv_files(dir: &Path) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv" || e == "txt"))
        .collect();
    files.sort();
    files
}

fn criterion_7(d: &Desk) -> Outcome {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("desk.txt");
    write_zeros(
        fs::File::create(&input).unwrap(),
        &d.zeros,
        FormatKind::PlainList,
    )
    .unwrap();
    let input = input.to_str().unwrap();
    let runs: [&[&str]; 7] = [
        &["compute-zeros", "--count", "2000", "--start-index", "1000"],
        &["--input", input, "sweep", "--histograms", "--n-to", "200"],
        &["--input", input, "detect"],
        &["--input", input, "fit", "--n-to", "3"],
        &[
            "fit",
            "--synthetic",
            "SB:0.5,1.5,2,6",
            "--samples",
            "20000",
            "--seed",
            "9",
        ],
        &["--input", input, "plane"],
        &["--input", input, "paircorr"],
    ];
    let mut c = Checks::default();
    for (k, args) in runs.iter().enumerate() {
        let outs: Vec<PathBuf> = ["a", "b"]
            .iter()
            .map(|tag| {
                let out = dir.path().join(format!("{tag}{k}"));
                let full = [&["--out-dir", out.to_str().unwrap()][..], args].concat();
                let code = zdl(dir.path(), &full);
                if code != 0 {
                    c.check(false, format!("{} exited {code}", args.join(" ")));
                }
                out
            })
            .collect();
        let (a, b) = (csv_files(&outs[0]), csv_files(&outs[1]));
        let same = !a.is_empty()
            && a.len() == b.len()
            && a.iter()
                .zip(&b)
                .all(|(x, y)| fs::read(x).unwrap() == fs::read(y).unwrap());
        let names: Vec<String> = a
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        c.check(same, format!("{} identical", names.join(",")));
    }
    c.outcome()
}

/// Mean, unbiased variance, skewness and kurtosis by two passes.
fn two_pass(values: &[f64]) -> [f64; 4] {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in values {
        let d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    let unbiased = m2 / (n - 1.0);
    let (m2, m3, m4) = (m2 / n, m3 / n, m4 / n);
    [mean, unbiased, m3 / m2.powf(1.5), m4 / (m2 * m2)]
}

fn criterion_8() -> Outcome {
    // A Poisson process far from the origin: delta(n) is gamma distributed
    // with skewness 2/sqrt(n), so no moment is close to zero.
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut t = 1.0e6;
    let ordinates: Vec<f64> = (0..1_000_100)
        .map(|_| {
            let u: f64 = rng.random_range(f64::EPSILON..1.0);
            t -= u.ln();
            t
        })
        .collect();
    let zeros = ZeroSet::from_ordinates(ordinates.clone(), 1).unwrap();
    let ns = [1usize, 2, 10, 100];
    let mut worst = 0.0f64;
    let mut c = Checks::default();
    for &n in &ns {
        let e = sweep(&zeros, n, n).unwrap().entries[0];
        let deltas: Vec<f64> = ordinates.windows(n + 1).map(|w| w[n] - w[0]).collect();
        c.check(
            e.count as usize == deltas.len() && deltas.len() >= 1_000_000,
            format!("n={n}: {} values", e.count),
        );
        let want = two_pass(&deltas);
        for (got, want) in [e.mean, e.variance, e.skewness, e.kurtosis]
            .iter()
            .zip(want)
        {
            worst = worst.max(((got - want) / want).abs());
        }
    }
    c.check(
        worst < 1e-9,
        format!("max relative difference {worst:.1e} (< 1e-9)"),
    );
    c.outcome()
}

fn main() {
    let mut failed = 0;
    let mut report = |k: usize, o: Outcome| {
        println!(
            "criterion {k}: {} ({})",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.pass {
            failed += 1;
        }
    };
    report(1, criterion_1());
    let d = load_desk();
    report(2, criterion_2(&d));
    report(3, criterion_3(&d));
    report(4, criterion_4());
    report(5, criterion_5(&d));
    report(6, criterion_6(&d));
    report(7, criterion_7(&d));
    report(8, criterion_8());
    if failed > 0 {
        println!("acceptance: {failed} of 8 criteria failed");
        std::process::exit(1);
    }
    println!("acceptance: all 8 criteria passed");
}
