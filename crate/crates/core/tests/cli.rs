use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn timeavg(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_timeavg"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("report on stdout")
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).expect("error JSON on stderr")
}

#[test]
fn roundtrip_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let o = timeavg(dir.path(), &["roundtrip", "--r-re", "1", "--T", "1", "--N", "64", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let report = stdout_json(&o);
    assert!(report["errors"]["roundtrip_rel_error"].as_f64().unwrap() <= 1e-12);
    assert_eq!(report["conditioning"]["well_posed"], Value::Bool(true));
    let on_disk: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(on_disk["errors"], report["errors"]);
    let zeta = fs::read_to_string(dir.path().join("zeta.csv")).unwrap();
    assert_eq!(zeta.lines().count(), 65);
}

#[test]
fn conditioning_at_zero_rate_exits_ill_posed() {
    let dir = tempfile::tempdir().unwrap();
    let t = (2.0 / std::f64::consts::PI).to_string();
    let o = timeavg(dir.path(), &["conditioning", "--r-re", "0", "--T", &t]);
    assert_eq!(o.status.code(), Some(2));
    let report = stdout_json(&o);
    assert_eq!(report["exit_code"], 2);
    assert_eq!(report["conditioning"]["min_abs_zeta"].as_f64(), Some(0.0));
    assert_eq!(report["conditioning"]["well_posed"], Value::Bool(false));
    let csv = fs::read_to_string(dir.path().join("conditioning.csv")).unwrap();
    assert!(csv.starts_with("k,lambda,abs_zeta,inv_zeta_bound,psi\n"));
}

#[test]
fn degenerate_recovery_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let t = (2.0 / std::f64::consts::PI).to_string();
    let o = timeavg(dir.path(), &["recover", "--r-re", "0", "--T", &t, "--N", "5"]);
    assert_eq!(o.status.code(), Some(3));
    let err = stderr_json(&o);
    assert_eq!(err["error"], "degenerate-mode");
    assert_eq!(err["modes"], serde_json::json!([1, 2, 3, 4, 5]));
}

#[test]
fn purely_imaginary_rate_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = timeavg(dir.path(), &["recover", "--r-re", "0", "--r-im", "1", "--N", "4"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "ill-posed-parameters");
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"L": -1}"#).unwrap();
    let o = timeavg(dir.path(), &["forward", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o)["exit_code"], 1);

    fs::write(&bad, r#"{"bogus": 1}"#).unwrap();
    let o = timeavg(dir.path(), &["forward", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));

    let o = timeavg(dir.path(), &["no-such-command"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn config_file_with_custom_basis() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"kind": "custom", "lambdas": [-2.0, 0.5, 3.0], "r": [1.0, 0.0], "T": 1.0,
            "coeffs": [[1.0, 0.0], [0.0, 1.0], [0.5, -0.5]], "steps": 10}"#,
    )
    .unwrap();
    let o = timeavg(dir.path(), &["recover", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout_json(&o)["conditioning"]["q"].as_f64(), Some(3.0));
    let traj = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert!(traj.starts_with("t,k,re,im\n"));
    assert_eq!(traj.lines().count(), 1 + 11 * 3);
    let xi: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("xi.json")).unwrap()).unwrap();
    assert_eq!(xi["kind"], "custom");
    assert_eq!(xi["coeffs"].as_array().unwrap().len(), 3);
}

#[test]
fn identical_configs_give_identical_csv_bytes() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for cmd in ["forward", "recover", "sweep", "conditioning"] {
        let args = [cmd, "--seed", "11", "--N", "24", "--noise", "1e-6"];
        assert_eq!(timeavg(a.path(), &args).status.code(), Some(0));
        assert_eq!(timeavg(b.path(), &args).status.code(), Some(0));
        for entry in fs::read_dir(a.path()).unwrap() {
            let path = entry.unwrap().path();
            if path.extension().and_then(|e| e.to_str()) == Some("csv") {
                let other = b.path().join(path.file_name().unwrap());
                assert_eq!(fs::read(&path).unwrap(), fs::read(other).unwrap(), "{}", path.display());
            }
        }
    }
}

#[test]
fn sweep_table_is_sorted_and_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let o = timeavg(dir.path(), &["sweep"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["errors"]["sweep_monotone"], Value::Bool(true));
    let mut rdr = csv::Reader::from_path(dir.path().join("errors.csv")).unwrap();
    let rows: Vec<Vec<f64>> = rdr
        .records()
        .map(|r| r.unwrap().iter().map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.iter().map(|r| r[0]).collect::<Vec<_>>(), vec![0.05, 0.1, 0.2, 0.5, 1.0]);
    // the sharp bound always holds, unlike stability_bound
    assert!(rows.iter().all(|r| r[4] <= r[6] * (1.0 + 1e-12)));
}

#[test]
fn oracle_check_reports_second_order_refinement() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"oracle": {"M": 511, "dt": 4e-4, "modes": 3}}"#).unwrap();
    let o = timeavg(dir.path(), &["oracle-check", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let e = &stdout_json(&o)["errors"];
    assert!(e["oracle_max_rel_error"].as_f64().unwrap() < 0.1);
    assert!(e["oracle_refinement_ratio"].as_f64().unwrap() > 3.5);
}
