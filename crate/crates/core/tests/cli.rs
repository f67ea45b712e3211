use std::path::Path;
use std::process::Command;

fn neumann(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_neumann"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn sample_writes_sorted_spectra() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = neumann(&[
        "sample",
        "--ensemble",
        "jue",
        "--n",
        "4",
        "--trials",
        "3",
        "--seed",
        "9",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = read(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "trial_index,trial_seed,eig_index,eigenvalue"
    );
    let rows: Vec<Vec<String>> = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    assert_eq!(rows.len(), 12);
    for trial in rows.chunks(4) {
        let eigs: Vec<f64> = trial.iter().map(|r| r[3].parse().unwrap()).collect();
        assert!(eigs.windows(2).all(|w| w[0] <= w[1]));
        assert!(eigs.iter().all(|e| e.abs() < 1.0));
    }
}

#[test]
fn limit_cdf_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    let o = neumann(&[
        "limit-cdf",
        "--law",
        "bessel",
        "--order",
        "2",
        "--quad",
        "30",
        "--tmax",
        "5",
        "--step",
        "0.5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = read(&out);
    assert!(text.starts_with("t,cdf,pdf\n"));
    assert_eq!(text.lines().count(), 12);
    let o = neumann(&[
        "limit-cdf",
        "--law",
        "exp",
        "--rate",
        "0.5",
        "--tmax",
        "2",
        "--step",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let last = read(&out).lines().last().unwrap().to_string();
    let cdf: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    assert!((cdf - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
}

#[test]
fn run_from_json_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"ensemble": {"kind": "uniform-eig-haar", "n": 10},
            "n_values": [10, 20], "trials": 6, "statistic": "k_measured",
            "rhs_mode": "basis_e1", "master_seed": 3}"#,
    )
    .unwrap();
    let out = dir.path().join("report");
    let o = neumann(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read(&out.join("trials.csv")).lines().count(), 13);
    let summary: serde_json::Value =
        serde_json::from_str(&read(&out.join("summary.json"))).unwrap();
    assert_eq!(summary["empty"], false);
    assert_eq!(summary["total_trials"], 12);
    assert_eq!(summary["total_saturated"], 0);
    assert!(out.join("histogram.csv").exists());
    assert!(out.join("statistics.csv").exists());
}

#[test]
fn run_rejects_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"ensemble": {"kind": "uniform-eig-haar", "n": 10},
            "n_values": [10], "trials": 0, "statistic": "K_scaled"}"#,
    )
    .unwrap();
    let o = neumann(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("trials"));
}

#[test]
fn verify_tail_norm_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.json");
    let o = neumann(&[
        "verify",
        "--suite",
        "lemma41",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stdout)
    );
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["suite"], "lemma41");
    assert_eq!(report["passed"], true);
    assert_eq!(report["checks"].as_array().unwrap().len(), 2);
    assert_eq!(
        serde_json::from_str::<serde_json::Value>(&read(&out)).unwrap(),
        report
    );
}

#[test]
fn verify_unknown_suite_fails() {
    let o = neumann(&["verify", "--suite", "nope"]);
    assert!(!o.status.success());
}
