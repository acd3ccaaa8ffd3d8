use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn zdl(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zdl"))
        .args(args)
        .current_dir(dir)
        .env_remove("ZDL_OUT_DIR")
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn assert_svg(path: &Path) {
    let text = fs::read_to_string(path).unwrap();
    let doc =
        roxmltree::Document::parse(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let root = doc.root_element();
    assert_eq!(root.tag_name().name(), "svg");
    for attr in ["width", "height"] {
        let v: f64 = root.attribute(attr).expect(attr).parse().unwrap();
        assert!(v > 0.0);
    }
}

/// Zeros at 1, 2, ..., len: every delta(n) distribution is a point mass.
fn write_progression(dir: &Path, len: usize) -> String {
    let text: String = (1..=len).map(|i| format!("{i}.0\n")).collect();
    fs::write(dir.join("ap.txt"), text).unwrap();
    "ap.txt".into()
}

#[test]
fn zero_count_is_a_parameter_error() {
    let dir = TempDir::new().unwrap();
    assert_eq!(
        code(&zdl(dir.path(), &["compute-zeros", "--count", "0"])),
        2
    );
    assert_eq!(code(&zdl(dir.path(), &["compute-zeros"])), 2);
}

#[test]
fn compute_zeros_writes_first_zeros() {
    let dir = TempDir::new().unwrap();
    let out = zdl(
        dir.path(),
        &["compute-zeros", "--count", "100", "--out", "zeros.txt"],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("zeros.txt")).unwrap();
    let values: Vec<f64> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.parse().unwrap())
        .collect();
    assert_eq!(values.len(), 100);
    assert!((values[0] - 14.134725).abs() < 1e-6);
    assert!(values.windows(2).all(|w| w[1] > w[0]));

    let again = zdl(
        dir.path(),
        &["compute-zeros", "--count", "100", "--out", "again.txt"],
    );
    assert_eq!(code(&again), 0);
    assert_eq!(
        fs::read(dir.path().join("again.txt")).unwrap(),
        text.as_bytes()
    );
}

#[test]
fn compute_zeros_honours_out_dir_env() {
    let dir = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_zdl"))
        .args(["compute-zeros", "--count", "5"])
        .current_dir(dir.path())
        .env("ZDL_OUT_DIR", "from-env")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(dir.path().join("from-env/zeros.txt").exists());
    assert!(
        !String::from_utf8_lossy(&out.stderr).is_empty(),
        "progress goes to stderr"
    );
}

#[test]
fn progression_sweep_has_zero_variance() {
    let dir = TempDir::new().unwrap();
    let input = write_progression(dir.path(), 500);
    let out = zdl(
        dir.path(),
        &[
            "--input",
            &input,
            "sweep",
            "--n-from",
            "3",
            "--n-to",
            "42",
            "--histograms",
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&dir.path().join("moments.csv"));
    assert_eq!(rows[0].join(","), "n,mean,variance,skewness,kurtosis,count");
    assert_eq!(rows.len() - 1, 42 - 3 + 1);
    for (k, row) in rows[1..].iter().enumerate() {
        let n = 3 + k;
        assert_eq!(row[0], n.to_string());
        assert_eq!(row[1].parse::<f64>().unwrap(), n as f64);
        assert_eq!(row[2].parse::<f64>().unwrap(), 0.0);
        assert_eq!(row[5], (500 - n).to_string());
    }
    let hist = csv_rows(&dir.path().join("histograms.csv"));
    assert_eq!(hist.len() - 1, 40 * 200);
}

#[test]
fn progression_detect_reports_unmatched_zeros() {
    let dir = TempDir::new().unwrap();
    let input = write_progression(dir.path(), 2000);
    let out = zdl(dir.path(), &["--input", &input, "detect"]);
    assert_eq!(code(&out), 5, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("detection.csv")).unwrap();
    assert!(text.starts_with("detected_x,reference_x,abs_error\n"));
    assert!(text.contains("# unmatched_detected="));
    assert!(text.contains("# unmatched_reference="));
    assert_svg(&dir.path().join("variance.svg"));

    let lenient = zdl(
        dir.path(),
        &["--input", &input, "detect", "--max-unmatched", "1000"],
    );
    assert_eq!(code(&lenient), 0);
}

#[test]
fn detect_on_computed_zeros_writes_svg() {
    let dir = TempDir::new().unwrap();
    let out = zdl(
        dir.path(),
        &[
            "--start-index",
            "100000",
            "--window",
            "20000",
            "--out-dir",
            "o",
            "detect",
            "--max-unmatched",
            "100",
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_svg(&dir.path().join("o/variance.svg"));
    let rows = csv_rows(&dir.path().join("o/detection.csv"));
    assert!(rows.len() > 1, "some zeros matched");
}

#[test]
fn fit_thresholds_and_synthetic_recovery() {
    let dir = TempDir::new().unwrap();
    let args = [
        "fit",
        "--synthetic",
        "SU:-1,2,10,3",
        "--samples",
        "20000",
        "--seed",
        "7",
    ];
    let out = zdl(dir.path(), &[&args[..], &["--plot-n", "0"]].concat());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&dir.path().join("fits.csv"));
    assert_eq!(rows[0].join(","), "n,family,gamma,delta,xi,lambda,ks");
    assert_eq!(rows[1][0], "0");
    assert_eq!(rows[1][1], "SU");
    assert_svg(&dir.path().join("fit_n0.svg"));
    let first = fs::read(dir.path().join("fits.csv")).unwrap();

    let strict = zdl(dir.path(), &[&args[..], &["--ks-max", "0"]].concat());
    assert_eq!(code(&strict), 6);
    assert_eq!(
        fs::read(dir.path().join("fits.csv")).unwrap(),
        first,
        "same seed, same fit"
    );

    assert_eq!(
        code(&zdl(dir.path(), &["fit", "--synthetic", "SX:1,2,3,4"])),
        2
    );
    assert_eq!(
        code(&zdl(dir.path(), &["fit", "--synthetic", "SU:1,2,3"])),
        2
    );
}

#[test]
fn fit_on_zeros_writes_one_row_per_offset() {
    let dir = TempDir::new().unwrap();
    let out = zdl(
        dir.path(),
        &[
            "--start-index",
            "100000",
            "--window",
            "5000",
            "fit",
            "--n-from",
            "2",
            "--n-to",
            "4",
            "--plot-n",
            "3",
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&dir.path().join("fits.csv"));
    let ns: Vec<&str> = rows[1..].iter().map(|r| r[0].as_str()).collect();
    assert_eq!(ns, ["2", "3", "4"]);
    assert_svg(&dir.path().join("fit_n3.svg"));
    assert!(!dir.path().join("fit_n2.svg").exists());
}

#[test]
fn plane_and_paircorr_outputs() {
    let dir = TempDir::new().unwrap();
    assert_eq!(
        code(&zdl(
            dir.path(),
            &["compute-zeros", "--count", "3000", "--out", "low.txt"]
        )),
        0
    );
    assert_eq!(
        code(&zdl(
            dir.path(),
            &[
                "compute-zeros",
                "--count",
                "3000",
                "--start-index",
                "50000",
                "--out",
                "high.txt"
            ]
        )),
        0
    );
    let out = zdl(
        dir.path(),
        &[
            "--input", "low.txt", "--input", "high.txt", "--n-to", "200", "plane",
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&dir.path().join("plane.csv"));
    assert_eq!(rows[0].join(","), "dataset,n,skewness,kurtosis,family");
    assert!(rows.iter().any(|r| r[0] == "low") && rows.iter().any(|r| r[0] == "high"));
    assert_eq!(
        csv_rows(&dir.path().join("boundary.csv"))[0].join(","),
        "skew_sq,kurtosis"
    );
    assert_svg(&dir.path().join("plane.svg"));

    let out = zdl(
        dir.path(),
        &["--input", "high.txt", "paircorr", "--bin-width", "0.1"],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&dir.path().join("paircorr.csv"));
    assert_eq!(rows[0].join(","), "x,empirical,model");
    assert_eq!(rows.len() - 1, 30);
    assert_svg(&dir.path().join("paircorr.svg"));
}

#[test]
fn config_file_precedence_and_errors() {
    let dir = TempDir::new().unwrap();
    let input = write_progression(dir.path(), 100);
    fs::write(
        dir.path().join("run.cfg"),
        format!("input = {input}\nn-from = 2\nn_to = 9\n"),
    )
    .unwrap();
    assert_eq!(code(&zdl(dir.path(), &["--config", "run.cfg", "sweep"])), 0);
    assert_eq!(csv_rows(&dir.path().join("moments.csv")).len() - 1, 8);
    assert_eq!(
        code(&zdl(
            dir.path(),
            &["--config", "run.cfg", "sweep", "--n-to", "4"]
        )),
        0
    );
    assert_eq!(csv_rows(&dir.path().join("moments.csv")).len() - 1, 3);

    fs::write(dir.path().join("bad.cfg"), "colour = blue\n").unwrap();
    assert_eq!(code(&zdl(dir.path(), &["--config", "bad.cfg", "sweep"])), 2);
    assert_eq!(
        code(&zdl(dir.path(), &["--config", "missing.cfg", "sweep"])),
        2
    );
}

#[test]
fn parameter_and_input_errors() {
    let dir = TempDir::new().unwrap();
    let input = write_progression(dir.path(), 100);
    let cases: &[(&[&str], i32)] = &[
        (
            &["--input", &input, "sweep", "--n-from", "9", "--n-to", "3"],
            2,
        ),
        (&["--input", &input, "sweep", "--n-to", "100"], 2),
        (
            &["--input", &input, "--window", "50", "sweep", "--n-to", "60"],
            2,
        ),
        (&["--input", &input, "sweep", "--smooth", "4"], 2),
        (&["--input", &input, "sweep", "--bins", "5"], 2),
        (&["--input", "absent.txt", "sweep"], 4),
        (&["--input", "unsorted.txt", "sweep"], 4),
        (&["--input", "garbage.txt", "sweep"], 4),
        (&["--input", &input, "--format", "base-offset", "sweep"], 4),
    ];
    fs::write(dir.path().join("unsorted.txt"), "1.0\n3.0\n2.0\n").unwrap();
    fs::write(dir.path().join("garbage.txt"), "1.0\nnope\n").unwrap();
    for (args, expected) in cases {
        assert_eq!(code(&zdl(dir.path(), args)), *expected, "{args:?}");
    }
}
