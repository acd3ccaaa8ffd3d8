//! Zero computation against values from an independent arbitrary-precision
//! evaluation (see tools/gen_reference.py).

use std::f64::consts::PI;
use std::io::BufReader;

use zdl_core::zeros::{
    compute_zeros, gram_point, parse_zeros, riemann_siegel_theta, riemann_siegel_z, write_zeros,
    z_function, FormatKind,
};
use zdl_core::Error;

const TABLE: &str = include_str!("data/zeros_1000.txt");
const SPOT: &str = include_str!("data/spot_values.txt");

fn table() -> Vec<f64> {
    parse_zeros(BufReader::new(TABLE.as_bytes()), FormatKind::PlainList)
        .unwrap()
        .offsets()
        .to_vec()
}

fn spot(kind: &str) -> Vec<(f64, f64)> {
    SPOT.lines()
        .filter_map(|l| {
            let mut it = l.split_whitespace();
            (it.next()? == kind).then(|| {
                let a = it.next().unwrap().parse().unwrap();
                let b = it.next().unwrap().parse().unwrap();
                (a, b)
            })
        })
        .collect()
}

#[test]
fn theta_spot_values() {
    for (t, want) in spot("theta") {
        if t <= 10.0 {
            assert!(matches!(riemann_siegel_theta(t), Err(Error::Domain(_))));
            continue;
        }
        let got = riemann_siegel_theta(t).unwrap();
        assert!((got - want).abs() < 1e-9, "theta({t}) = {got}, want {want}");
    }
    assert!(riemann_siegel_theta(17.845_599_540_410_86).unwrap().abs() < 1e-8);
    assert!(riemann_siegel_theta(50.0).unwrap() < riemann_siegel_theta(60.0).unwrap());
}

#[test]
fn z_spot_values() {
    for (t, want) in spot("z") {
        let rs = riemann_siegel_z(t).unwrap();
        assert_eq!(rs > 0.0, want > 0.0, "sign of Z({t})");
        // The asymptotic series loses accuracy at the lowest heights.
        let tol = if t < 100.0 { 1e-5 } else { 1e-6 };
        assert!((rs - want).abs() < tol, "Z({t}) = {rs}, want {want}");
        assert!((z_function(t) - want).abs() < 1e-7, "z_function({t})");
    }
    assert!(riemann_siegel_z(14.134725).unwrap().abs() < 1e-4);
    assert!(riemann_siegel_z(9.99).is_err());
}

#[test]
fn gram_spot_values() {
    for (k, want) in spot("gram") {
        let got = gram_point(k as u64);
        assert!(
            (got - want).abs() < 1e-9 * want.max(1.0),
            "g_{k} = {got}, want {want}"
        );
    }
    let (g0, g1) = (gram_point(0), gram_point(1));
    assert!(riemann_siegel_z(g0).unwrap() * riemann_siegel_z(g1).unwrap() < 0.0);
    for k in 0..500 {
        assert!(gram_point(k + 1) > gram_point(k));
    }
}

#[test]
fn first_thousand_zeros_match_table() {
    let want = table();
    assert_eq!(want.len(), 1000);
    let got = compute_zeros(1000, 1).unwrap();
    assert_eq!(got.start_index(), 1);
    let worst = got
        .offsets()
        .iter()
        .zip(&want)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-6, "max deviation {worst:e}");
}

#[test]
fn named_low_zeros() {
    let five = compute_zeros(5, 1).unwrap();
    assert!((five.offsets()[4] - 32.935_061).abs() < 1e-6);
    let eight = compute_zeros(8, 1).unwrap();
    for named in [37.586, 40.919, 43.327] {
        assert!(
            eight.offsets().iter().any(|z| (z - named).abs() < 1e-3),
            "{named}"
        );
    }
}

#[test]
fn counts_match_theta_at_good_gram_points() {
    // Below a Gram point g_k with (-1)^k Z(g_k) > 0 there are k + 1 zeros,
    // i.e. floor(theta(g_k) / pi) + 1.
    let zeros = table();
    let mut checked = 0;
    for k in 0..900u64 {
        let g = gram_point(k);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        if sign * z_function(g) <= 0.0 {
            continue;
        }
        let below = zeros.partition_point(|&z| z < g);
        let estimate = (riemann_siegel_theta(g).unwrap() / PI + 0.5).floor() as usize + 1;
        assert_eq!(below, estimate, "g_{k} = {g}");
        checked += 1;
    }
    assert!(checked > 700);
}

#[test]
fn table_roundtrips_through_writer() {
    let zs = parse_zeros(BufReader::new(TABLE.as_bytes()), FormatKind::PlainList).unwrap();
    let mut buf = Vec::new();
    write_zeros(&mut buf, &zs, FormatKind::PlainList).unwrap();
    let back = parse_zeros(&buf[..], FormatKind::PlainList).unwrap();
    assert_eq!(back, zs);
}
