//! End-to-end checks of the command-line surface: CSV schemas, manifest
//! emission, determinism, and exit codes.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_defloor"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_lines(out: &Output) -> Vec<String> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(str::to_owned)
        .collect()
}

fn field(line: &str, idx: usize) -> f64 {
    line.split(',')
        .nth(idx)
        .unwrap_or_else(|| panic!("no field {idx} in {line:?}"))
        .parse()
        .unwrap_or_else(|_| panic!("field {idx} of {line:?} is not a number"))
}

fn fixture(name: &str) -> String {
    format!("{}/../core/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn phi_sweep_emits_inclusive_grid_with_bounds() {
    let out = run(&["phi", "--x-min", "1", "--x-max", "100", "--step", "1"]);
    assert!(out.status.success());
    let lines = stdout_lines(&out);
    assert_eq!(lines[0], "x,phi,lower,upper");
    assert_eq!(lines.len(), 101, "header plus one row per grid point");
    for line in &lines[1..] {
        let (x, p, lo, hi) = (field(line, 0), field(line, 1), field(line, 2), field(line, 3));
        assert!(p > 0.0 && p < 1.0);
        if x >= 3.5 {
            assert!(lo <= p && p <= hi, "bounds out of order at x = {x}");
        }
    }

    // Without --out the reproduction manifest goes to stderr.
    let manifest: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(manifest["command"], "phi");
}

#[test]
fn phi_point_and_sweep_flags_conflict() {
    let out = run(&["phi", "--x", "1", "--x-min", "1", "--x-max", "2", "--step", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn de_rows_keep_the_consistent_variance() {
    let out = run(&["de", "--ensemble", "3:6", "--ebn0-db", "2.8", "--iters", "5"]);
    assert!(out.status.success());
    let lines = stdout_lines(&out);
    assert_eq!(lines[0], "iteration,mean,variance");
    assert_eq!(lines.len(), 6);
    let mut prev = 0.0;
    for (i, line) in lines[1..].iter().enumerate() {
        assert_eq!(field(line, 0) as usize, i + 1);
        let (mean, var) = (field(line, 1), field(line, 2));
        assert!((var - 2.0 * mean).abs() <= 1e-7 * mean, "variance drifted from 2x mean");
        assert!(mean > prev, "means must increase at 2.8 dB");
        prev = mean;
    }
    assert!((field(&lines[1], 1) - 0.6248).abs() < 1e-3);
}

#[test]
fn thresholds_curve_and_breakout_rows() {
    let out = run(&[
        "thresholds",
        "--ensemble",
        "3:6",
        "--r-list",
        "1.696",
        "--m-min",
        "9.0",
        "--m-max",
        "9.5",
        "--m-steps",
        "2",
    ]);
    assert!(out.status.success());
    let lines = stdout_lines(&out);
    assert_eq!(lines[0], "series,param,m_prev,ebn0_db");
    let curve: Vec<&String> = lines.iter().filter(|l| l.starts_with("curve,")).collect();
    let breakout: Vec<&String> = lines.iter().filter(|l| l.starts_with("breakout,")).collect();
    assert_eq!(curve.len(), 2);
    assert_eq!(breakout.len(), 1);

    // Larger prior means need less channel help, and 9.26 @ 2.8 dB sits
    // between the two grid points.
    let lo = field(curve[0], 3);
    let hi_m = field(curve[1], 3);
    assert!(lo > hi_m, "threshold must fall as m_prev grows");
    assert!((2.5..3.1).contains(&lo) && (2.5..3.1).contains(&hi_m));

    assert!((field(breakout[0], 3) - 5.077).abs() < 0.01);
    assert!(breakout[0].split(',').nth(2).unwrap().is_empty(), "breakout rows have no m_prev");
}

#[test]
fn ts_reports_the_fixture_radius() {
    let out = run(&["ts", "--ts", &fixture("ts_12_4.json")]);
    assert!(out.status.success());
    let lines = stdout_lines(&out);
    assert_eq!(lines[0], "a,b,n_states,r,method");
    assert_eq!(lines.len(), 2);
    let row = &lines[1];
    assert_eq!(field(row, 0) as u32, 12);
    assert_eq!(field(row, 1) as u32, 4);
    assert_eq!(field(row, 2) as u32, 32);
    assert!((field(row, 3) - 1.699301).abs() < 5e-4);
}

#[test]
fn ts_rejects_a_self_paired_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"dv":3,"a":1,"deg2_checks":[[0,0]],"deg1_checks":[0]}"#).unwrap();
    let out = run(&["ts", "--ts", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_is_deterministic_and_writes_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &str| {
        vec![
            "simulate".to_owned(),
            "--margulis".to_owned(),
            "--ebn0-db".to_owned(),
            "2.8".to_owned(),
            "--frames".to_owned(),
            "2".to_owned(),
            "--iters".to_owned(),
            "5".to_owned(),
            "--seed".to_owned(),
            "9".to_owned(),
            "--out".to_owned(),
            dir.path().join(out).to_str().unwrap().to_owned(),
        ]
    };
    let first = run(&args("a.csv").iter().map(String::as_str).collect::<Vec<_>>());
    let second = run(&args("b.csv").iter().map(String::as_str).collect::<Vec<_>>());
    assert!(first.status.success() && second.status.success());
    assert!(String::from_utf8_lossy(&first.stderr).contains("frames=2"));

    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b, "same seed must reproduce the same CSV bytes");

    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "iteration,mean,variance,var_over_mean,var_over_mean_sq,beta_prime"
    );
    assert_eq!(lines.count(), 5);

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("a.csv.manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["command"], "simulate");
    assert_eq!(manifest["parameters"]["frames"], "2");
}

#[test]
fn usage_errors_exit_with_code_two() {
    // Nonpositive saturation limit.
    let out = run(&[
        "simulate", "--margulis", "--ebn0-db", "2.8", "--frames", "1", "--iters", "2",
        "--saturate", "0",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // Unreadable parity-check file.
    let out = run(&[
        "simulate", "--alist", "/nonexistent/h.alist", "--ebn0-db", "2.8", "--frames", "1",
        "--iters", "2",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // Contradictory H sources.
    let out = run(&[
        "simulate", "--margulis", "--alist", "x.alist", "--ebn0-db", "2.8", "--frames", "1",
        "--iters", "2",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // Malformed ensemble string.
    let out = run(&["de", "--ensemble", "3x6", "--ebn0-db", "2.8", "--iters", "2"]);
    assert_eq!(out.status.code(), Some(2));
}
