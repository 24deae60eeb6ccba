use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_coupled-modes"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

/// Rows of a CSV file as parsed numbers, header checked.
fn read_csv(path: &Path, header: &str) -> Vec<Vec<f64>> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(header));
    lines.map(|l| l.split(',').map(|x| x.parse::<f64>().unwrap()).collect()).collect()
}

const SOLVE_HEADER: &str = "t,trace,min_eigenvalue,leakage,P11,n1_occ,n2_occ";

#[test]
fn solve_reaches_the_dip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("dip.csv");
    let o = run(&[
        "solve", "--g", "1", "--gamma1", "0", "--gamma2", "0", "--nbar", "0", "--cutoff", "4", "--state", "1", "1",
        "--tmax", "0.7853981633974483", "--steps", "2", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_csv(&out, SOLVE_HEADER);
    assert_eq!(rows.len(), 3);
    assert!(rows[2][4] <= 1e-8);

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("dip.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "solve");
    assert_eq!(manifest["configs"][0]["cutoff"], 4);
    assert_eq!(manifest["grids"]["t"].as_array().unwrap().len(), 3);
}

#[test]
fn solve_at_time_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("zero.csv");
    let o = run(&["solve", "--gamma1", "0.3", "--nbar", "0.01", "--tmax", "0", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_csv(&out, SOLVE_HEADER);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], 0.0);
    assert!((rows[0][1] - 1.0).abs() <= 1e-12);
    assert!((rows[0][4] - 1.0).abs() <= 1e-12);
}

#[test]
fn solve_rejects_missing_margin() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let o = run(&["solve", "--state", "5", "0", "--cutoff", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("margin"), "{err}");
    assert!(!out.exists());

    let o = run(&["solve", "--state", "thermal", "x"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# lossless\ncutoff = 5\ngamma1 = 0.9\nsteps = 4\n").unwrap();
    let out = dir.path().join("r.csv");
    let o = run(&["solve", "--config", cfg.to_str().unwrap(), "--gamma1", "0", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read_csv(&out, SOLVE_HEADER).len(), 5);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["settings"]["cutoff"], 5);
    assert_eq!(manifest["settings"]["gamma1"], 0.0);
}

#[test]
fn hom_single_column_matches_solve() {
    let dir = tempfile::tempdir().unwrap();
    let hom_dir = dir.path().join("hom");
    let common = ["--gamma2", "0.4", "--nbar", "0.01", "--cutoff", "5", "--tmax", "3"];
    let mut args = vec!["hom", "--gamma1-max", "0", "--t-points", "31", "--out", hom_dir.to_str().unwrap()];
    args.extend(common);
    let o = run(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let hom = read_csv(&hom_dir.join("hom_nbar_0.01.csv"), "t,gamma1_over_g,P11,valid_flag");
    assert!(hom_dir.join("manifest.json").exists());

    let out = dir.path().join("s.csv");
    let mut args = vec!["solve", "--gamma1", "0", "--steps", "30", "--out", out.to_str().unwrap()];
    args.extend(common);
    let o = run(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let solve = read_csv(&out, SOLVE_HEADER);

    // The sweep grid also carries t = π/4.
    let mut matched = 0;
    for row in &hom {
        assert_eq!(row[1], 0.0);
        assert_eq!(row[3], 1.0);
        if let Some(s) = solve.iter().find(|s| (s[0] - row[0]).abs() <= 1e-12) {
            assert!((s[4] - row[2]).abs() <= 1e-12, "t = {}: {} vs {}", row[0], s[4], row[2]);
            matched += 1;
        }
    }
    assert_eq!(matched, solve.len());
}

#[test]
fn hom_writes_panels_and_heatmap() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep");
    let png = dir.path().join("map.png");
    let o = run(&[
        "hom", "--t-points", "9", "--gamma1-points", "3", "--jobs", "2", "--out", out.to_str().unwrap(), "--render",
        png.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for nbar in ["0", "0.01"] {
        let rows = read_csv(&out.join(format!("hom_nbar_{nbar}.csv")), "t,gamma1_over_g,P11,valid_flag");
        // π/4 is already the third of 9 points on [0, π].
        assert_eq!(rows.len(), 3 * 9);
        // Sorted by γ₁, then t.
        assert!(rows.windows(2).all(|w| (w[0][1], w[0][0]) < (w[1][1], w[1][0])));
    }
    assert!(std::fs::metadata(&png).unwrap().len() > 0);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["configs"].as_array().unwrap().len(), 2);
    assert_eq!(manifest["details"]["invalid_cells"], 0);
}

#[test]
fn hom_fails_when_too_many_cells_are_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("hot");
    // n̄ = 0.5 is beyond the transformed pipeline's reach: every cell fails.
    let o = run(&["hom", "--nbar", "0.5", "--t-points", "3", "--gamma1-points", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let rows = read_csv(&out.join("hom_nbar_0.5.csv"), "t,gamma1_over_g,P11,valid_flag");
    assert!(rows.iter().all(|r| r[3] == 0.0 && r[2].is_nan()));
}

#[test]
fn verify_is_deterministic_and_honors_tolerance() {
    let a = run(&["verify", "--seed", "7"]);
    let b = run(&["verify", "--seed", "7"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
    let table = String::from_utf8_lossy(&a.stdout);
    assert!(!table.contains("FAIL"));
    assert_eq!(table.lines().filter(|l| l.ends_with("PASS")).count(), 9);

    let strict = run(&["verify", "--seed", "7", "--tol", "1e-20"]);
    assert_eq!(strict.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&strict.stdout).contains("FAIL"));
}
