use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn torbit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torbit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn torbit_threads(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torbit"))
        .args(args)
        .env("TORBIT_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Header and data rows, with the `#` comment lines dropped.
fn table(csv: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header = lines
        .next()
        .expect("header row")
        .split(',')
        .map(String::from)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"))
}

fn f(s: &str) -> f64 {
    s.parse().unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("torbit-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn fields_command() {
    let out = stdout(&torbit(&["fields", "--degree", "2", "--disc-bound", "100"]));
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines[0].starts_with("# tool: torbit "));
    assert_eq!(lines[1], "# experiment: fields");
    assert!(lines[2].starts_with("# config: {"));
    let (h, rows) = table(&out);
    assert_eq!(
        h,
        ["disc", "min_poly_coeffs", "regulator", "covolume_regulator"]
    );
    assert_eq!(rows.len(), 30);
    let discs: Vec<i64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(discs.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(rows[0][..2], ["5", "-1 -1 1"]);
    assert!((f(&rows[0][2]) - 0.481211825060).abs() < 1e-11);

    let bad = torbit(&["fields", "--degree", "5", "--disc-bound", "100"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(!bad.stderr.is_empty());

    let (_, rows) = table(&stdout(&torbit(&[
        "fields",
        "--degree",
        "2",
        "--disc-bound",
        "4",
    ])));
    assert!(rows.is_empty());
}

#[test]
fn output_is_deterministic() {
    let args = ["fields", "--degree", "3", "--disc-bound", "1500"];
    let a = stdout(&torbit_threads(&args, "1"));
    let b = stdout(&torbit_threads(&args, "4"));
    assert_eq!(a, b);
    let args = [
        "times23", "--q-min", "5", "--q-max", "100000", "--sample", "20", "--seed", "9",
    ];
    assert_eq!(stdout(&torbit(&args)), stdout(&torbit(&args)));
    let other = stdout(&torbit(&[
        "times23", "--q-min", "5", "--q-max", "100000", "--sample", "20", "--seed", "10",
    ]));
    assert_ne!(table(&stdout(&torbit(&args))).1, table(&other).1);
}

fn summary(path: &PathBuf) -> Value {
    let s = std::fs::read_to_string(format!("{}.summary.json", path.display())).unwrap();
    serde_json::from_str(&s).unwrap()
}

#[test]
fn minkowski_scan_command() {
    let p = tmp("mink1.csv");
    stdout(&torbit(&[
        "minkowski-scan",
        "--degree",
        "2",
        "--disc-bound",
        "100",
        "--delta",
        "1",
        "--out",
        p.to_str().unwrap(),
    ]));
    assert_eq!(summary(&p)["sum_regulator_h_delta"].as_f64().unwrap(), 0.0);

    let p = tmp("mink0.csv");
    stdout(&torbit(&[
        "minkowski-scan",
        "--degree",
        "2",
        "--disc-bound",
        "300",
        "--delta",
        "0",
        "--out",
        p.to_str().unwrap(),
    ]));
    let (h, rows) = table(&std::fs::read_to_string(&p).unwrap());
    assert_eq!(
        &h[..6],
        [
            "disc",
            "n_classes",
            "m_K",
            "m_K/sqrt_disc",
            "regulator",
            "h_delta"
        ]
    );
    let (reg, classes, bad) = (
        col(&h, "regulator"),
        col(&h, "n_classes"),
        col(&h, "h_delta"),
    );
    let want: f64 = rows.iter().map(|r| f(&r[reg]) * f(&r[classes])).sum();
    assert!(rows.iter().all(|r| r[classes] == r[bad]));
    assert!(rows.iter().all(|r| r[0].parse::<i64>().unwrap() < 300));
    let got = summary(&p)["sum_regulator_h_delta"].as_f64().unwrap();
    assert!((got - want).abs() < 1e-8 * want);

    // h_delta does not increase with delta
    let p2 = tmp("mink2.csv");
    stdout(&torbit(&[
        "minkowski-scan",
        "--degree",
        "2",
        "--disc-bound",
        "300",
        "--delta",
        "0.2",
        "--out",
        p2.to_str().unwrap(),
    ]));
    let (_, rows2) = table(&std::fs::read_to_string(&p2).unwrap());
    assert!(rows
        .iter()
        .zip(&rows2)
        .all(|(a, b)| f(&b[bad]) <= f(&a[bad])));

    let p3 = tmp("mink3.csv");
    stdout(&torbit(&[
        "minkowski-scan",
        "--degree",
        "3",
        "--disc-bound",
        "5000",
        "--delta",
        "0.05",
        "--out",
        p3.to_str().unwrap(),
    ]));
    let s = summary(&p3);
    assert_eq!(s["fields"], 173);
    assert!((s["sum_regulator_h_delta"].as_f64().unwrap() - 37.3426322421).abs() < 1e-8);
    assert_eq!(s["meta"]["experiment"], "minkowski-scan");
}

#[test]
fn orbit_command() {
    let out = stdout(&torbit(&["orbit", "--poly=-1,-2,1,1"]));
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["disc"], "49");
    assert_eq!(v["disc_wedge"], "147");
    assert_eq!(v["cusp_excursion_num"], "1");
    assert_eq!(v["cusp_excursion_den_sq"], "49");
    let swapped: Value = serde_json::from_str(&stdout(&torbit(&[
        "orbit",
        "--poly=-1,-2,1,1",
        "--theta",
        "2,0,1",
    ])))
    .unwrap();
    for key in [
        "disc",
        "disc_wedge",
        "volume",
        "cusp_excursion_num",
        "canonical_key",
    ] {
        assert_eq!(v[key], swapped[key], "{key}");
    }
    assert_eq!(
        torbit(&["orbit", "--poly=-1,-2,1,1", "--class-index", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        torbit(&["orbit", "--poly=-10,0,1", "--class-index", "1"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(torbit(&["orbit", "--poly=1,0,1"]).status.code(), Some(2));
}

#[test]
fn abundance_command() {
    let out = stdout(&torbit(&[
        "abundance",
        "--delta",
        "0.01",
        "--delta-max",
        "1000",
        "--grid-decades",
        "2",
    ]));
    let (h, rows) = table(&out);
    assert_eq!(
        h,
        [
            "Delta",
            "delta",
            "n_orbits_inside",
            "total_length_inside",
            "total_length_all"
        ]
    );
    let row = rows.iter().find(|r| r[0] == "100").unwrap();
    assert_eq!(row[2], "45");
    assert!((f(&row[3]) - 401.774992966).abs() < 1e-8);
    for w in rows.windows(2) {
        assert!(f(&w[0][3]) <= f(&w[1][3]) && f(&w[0][4]) <= f(&w[1][4]));
    }
    assert_eq!(
        torbit(&["abundance", "--delta", "0.01", "--delta-max", "5000000"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        torbit(&["abundance", "--delta", "0", "--delta-max", "100"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn escape_command() {
    let run = |delta: &str| {
        table(&stdout(&torbit(&[
            "escape", "--a-min", "-1", "--a-max", "8", "--delta", delta, "--grid", "20",
        ])))
    };
    let (h, lo) = run("0.05");
    let (_, hi) = run("0.2");
    assert_eq!(
        h,
        [
            "a",
            "disc",
            "classical_regulator",
            "regulator_over_log_disc_sq",
            "cusp_excursion",
            "escaped_mass_fraction"
        ]
    );
    assert_eq!(lo[0][..2], ["-1", "49"]);
    assert!((f(&lo[0][2]) - 0.525454682123).abs() < 1e-11);
    assert!((f(&lo[0][4]) - 1.0 / 7.0).abs() < 1e-11);
    let e = col(&h, "escaped_mass_fraction");
    assert!(lo.iter().zip(&hi).all(|(a, b)| f(&a[e]) <= f(&b[e])));
    assert_eq!(torbit(&["escape", "--delta", "0"]).status.code(), Some(2));
    assert_eq!(
        torbit(&["escape", "--delta", "0.1", "--grid", "5"])
            .status
            .code(),
        Some(2)
    );
    let (_, empty) = table(&stdout(&torbit(&[
        "escape", "--a-min", "3", "--a-max", "1", "--delta", "0.1",
    ])));
    assert!(empty.is_empty());
}

#[test]
fn separation_command() {
    let run = |r: &str| {
        table(&stdout(&torbit(&[
            "separation",
            "--disc-bound",
            "100",
            "--window-r",
            r,
        ])))
    };
    let (h, rows) = run("4");
    assert_eq!(
        h,
        ["D1", "D2", "window_R", "grid", "min_dist", "scaled_stat"]
    );
    assert_eq!(rows[0][..4], ["5", "8", "4", "20"]);
    assert!((f(&rows[0][4]) - 0.227511998864).abs() < 1e-9);
    for r in &rows {
        let d: f64 = f(&r[0]) * f(&r[1]);
        assert!((f(&r[5]) - f(&r[4]) * d.sqrt()).abs() < 1e-9 * f(&r[5]));
    }
    // a larger window can only bring orbits closer
    let (_, wide) = run("8");
    for r in &rows {
        if let Some(w) = wide.iter().find(|w| w[0] == r[0] && w[1] == r[1]) {
            assert!(f(&w[4]) <= f(&r[4]) + 1e-12);
        }
    }
    assert_eq!(
        torbit(&["separation", "--disc-bound", "100", "--ratio", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        torbit(&["separation", "--disc-bound", "6"]).status.code(),
        Some(1)
    );
}

#[test]
fn times23_command() {
    let out = stdout(&torbit(&["times23", "--q-min", "5", "--q-max", "40"]));
    let (h, rows) = table(&out);
    assert_eq!(
        h,
        [
            "q",
            "group_order",
            "ratio_log_order_log_q",
            "H1",
            "entropy_floor",
            "max_discrepancy",
            "max_norm_exp_sum"
        ]
    );
    let r7 = rows.iter().find(|r| r[0] == "7").unwrap();
    assert_eq!(r7[1], "6");
    assert!((f(&r7[6]) - 1.0 / 6.0).abs() < 1e-11);
    let r25 = rows.iter().find(|r| r[0] == "25").unwrap();
    assert_eq!(r25[6], "");
    let qs: Vec<u64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(qs.windows(2).all(|w| w[0] < w[1]));
    assert!(rows.iter().all(|r| f(&r[3]) >= f(&r[4]) - 1e-9));

    let (_, primes) = table(&stdout(&torbit(&[
        "times23",
        "--q-min",
        "5",
        "--q-max",
        "40",
        "--primes-only",
    ])));
    assert!(primes.iter().all(|p| rows.contains(p)));
    let (_, empty) = table(&stdout(&torbit(&[
        "times23", "--q-min", "9", "--q-max", "9",
    ])));
    assert!(empty.is_empty());
}
