use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gue-lab")).args(args).output().expect("binary runs")
}

fn out_dir(d: &Path, name: &str) -> String {
    d.join(name).to_str().unwrap().to_string()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn help_lists_subcommands_and_keys() {
    let o = lab(&["--help"]);
    assert!(o.status.success());
    let s = String::from_utf8(o.stdout).unwrap();
    for sub in ["verify-identities", "kernel-stats", "clt", "zeros"] {
        assert!(s.contains(sub), "{sub}");
    }
    for key in ["seed", "grid_step", "edge_exponent", "lambdas", "replicates", "sampler"] {
        assert!(s.contains(key), "{key}");
    }
}

#[test]
fn identities_pass_and_negative_control_fails() {
    let d = tempfile::tempdir().unwrap();
    let o = lab(&["verify-identities", "--out", &out_dir(d.path(), "a")]);
    assert_eq!(o.status.code(), Some(0));
    let rows = json(&d.path().join("a/identities.json"))["rows"].as_array().unwrap().len();
    assert_eq!(rows, 5 * 33);

    let o = lab(&["verify-identities", "--grid-step", "0.1", "--out", &out_dir(d.path(), "b")]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&d.path().join("b/identities.json"));
    assert!(v["rows"].as_array().unwrap().len() > rows);
    assert_eq!(v["pass"], Value::Bool(true));

    let o = lab(&["verify-identities", "--corrupt-constant", "--out", &out_dir(d.path(), "c")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stderr).unwrap().contains("FAIL"));
}

#[test]
fn zeros_usage_and_small_case() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(lab(&["zeros", "--n", "0"]).status.code(), Some(2));

    let o = lab(&["zeros", "--n", "2", "--format", "csv", "--out", &out_dir(d.path(), "z")]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(d.path().join("z/zeros.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("k,zero,semicircle,scaled_error,refined,refined_error"));
    let z: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    assert!((z[0] + r).abs() < 1e-14 && (z[1] - r).abs() < 1e-14);
    assert!(!csv.contains('\r'));

    let o = lab(&["zeros", "--n", "400", "--out", &out_dir(d.path(), "y")]);
    assert!(o.status.success());
    let c = json(&d.path().join("y/zeros.json"))["summary"]["fitted_c_bulk"].as_f64().unwrap();
    assert!(c > 1.0 && c < 2.0, "{c}");
}

#[test]
fn kernel_stats_records() {
    let d = tempfile::tempdir().unwrap();
    let o = lab(&["kernel-stats", "--n", "50", "--lo", "1", "--hi", "1", "--out", &out_dir(d.path(), "e")]);
    assert!(o.status.success());
    let v = json(&d.path().join("e/kernel_stats.json"));
    assert_eq!(v["expected_count"].as_f64(), Some(0.0));
    assert_eq!(v["number_variance"].as_f64(), Some(0.0));

    let o = lab(&["kernel-stats", "--n", "2000", "--t", "0.9", "--out", &out_dir(d.path(), "t")]);
    assert!(o.status.success());
    let v = json(&d.path().join("t/kernel_stats.json"));
    assert!(v["edge_count_minus_leading"].as_f64().unwrap().abs() <= 2.0);

    assert_eq!(lab(&["kernel-stats", "--n", "5000"]).status.code(), Some(2));
}

#[test]
fn config_file_rules() {
    let d = tempfile::tempdir().unwrap();
    let bad = d.path().join("bad.toml");
    std::fs::write(&bad, "bogus = 1\n").unwrap();
    let o = lab(&["--config", bad.to_str().unwrap(), "zeros"]);
    assert_eq!(o.status.code(), Some(2));

    let good = d.path().join("good.toml");
    std::fs::write(&good, "n = 64\nseed = 9\nreplicates = 300\n").unwrap();
    let o = lab(&["clt", "--config", good.to_str().unwrap(), "--seed", "11", "--print-config"]);
    assert!(o.status.success());
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.contains("n = 64") && s.contains("seed = 11") && s.contains("replicates = 300") && s.contains("k = 32"));
}

#[test]
fn clt_validation_and_determinism() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(lab(&["clt", "--replicates", "50", "--out", &out_dir(d.path(), "x")]).status.code(), Some(2));

    let args = |name: &str| {
        vec![
            "clt".to_string(),
            "--mode".into(),
            "bulk-joint".into(),
            "--n".into(),
            "256".into(),
            "--replicates".into(),
            "300".into(),
            "--seed".into(),
            "4".into(),
            "--out".into(),
            out_dir(d.path(), name),
        ]
    };
    let run = || {
        let a = args("r");
        lab(&a.iter().map(String::as_str).collect::<Vec<_>>());
        ["report.json", "metadata.json"].map(|f| std::fs::read(d.path().join("r").join(f)).unwrap())
    };
    let first = run();
    let second = run();
    assert!(first == second, "outputs differ between identical runs");
    let r = json(&d.path().join("r/report.json"));
    assert_eq!(r["schema"].as_u64(), Some(1));
    assert_eq!(r["target_cov"]["lambda"][0][1].as_f64(), Some(0.5));
    assert!(r["verdicts"][0]["provenance"].as_str().unwrap().contains("pilot"));
}

#[test]
fn clt_joint_edge_correlation_verdict() {
    let d = tempfile::tempdir().unwrap();
    let o = lab(&[
        "clt",
        "--mode",
        "edge-joint",
        "--n",
        "4096",
        "--gamma",
        "0.5",
        "--thetas",
        "0.25",
        "--replicates",
        "2000",
        "--format",
        "csv",
        "--out",
        &out_dir(d.path(), "j"),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = std::fs::read_to_string(d.path().join("j/verdicts.csv")).unwrap();
    assert!(v.starts_with("name,value,target,tolerance,pass\ncorr_1_2,"));
    assert!(v.trim_end().ends_with("true"));
    let samples = std::fs::read_to_string(d.path().join("j/samples.csv")).unwrap();
    assert_eq!(samples.lines().count(), 2001);
}

#[test]
fn clt_exit_code_follows_verdicts() {
    let d = tempfile::tempdir().unwrap();
    let o = lab(&["clt", "--n", "256", "--replicates", "500", "--format", "csv", "--out", &out_dir(d.path(), "s")]);
    let v = std::fs::read_to_string(d.path().join("s/verdicts.csv")).unwrap();
    let all = v.lines().skip(1).all(|l| l.ends_with(",true"));
    assert_eq!(o.status.code(), Some(if all { 0 } else { 1 }));
}
