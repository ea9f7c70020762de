//! Exit-code contract and report determinism for the command-line tool.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_statvac"))
}

fn run_verify(dir: &Path, name: &str, extra: &[&str]) -> (i32, Vec<u8>) {
    let out_path = dir.join(name);
    let output = bin()
        .arg("verify")
        .args(extra)
        .arg("--output")
        .arg(&out_path)
        .output()
        .unwrap();
    let code = output.status.code().unwrap();
    let bytes = std::fs::read(&out_path).unwrap_or_default();
    (code, bytes)
}

#[test]
fn a11_identical_configs_produce_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "--metric",
        "ads-fg",
        "--n",
        "3",
        "--suite",
        "all",
        "--points",
        "40",
    ];
    let (c1, b1) = run_verify(dir.path(), "one.json", &args);
    let (c2, b2) = run_verify(dir.path(), "two.json", &args);
    assert_eq!((c1, c2), (0, 0));
    assert!(!b1.is_empty());
    let ok = b1 == b2;
    println!(
        "acceptance 11 byte-identical reports: {} [{} bytes]",
        if ok { "PASS" } else { "FAIL" },
        b1.len()
    );
    assert!(ok, "reports from identical configs differ");
}

#[test]
fn exit_codes_follow_the_contract() {
    let dir = tempfile::tempdir().unwrap();

    let (code, _) = run_verify(
        dir.path(),
        "lind.json",
        &[
            "--metric",
            "schwarzschild-ads",
            "--n",
            "3",
            "--M",
            "1",
            "--identity",
            "lindblom",
        ],
    );
    assert_eq!(code, 0);

    // The wrong-sign variant is reported as a failing identity, not an error.
    let (code, bytes) = run_verify(
        dir.path(),
        "plus.json",
        &[
            "--metric",
            "hyperbolic",
            "--n",
            "3",
            "--identity",
            "bochner-plus",
        ],
    );
    assert_eq!(code, 1);
    let report: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(report["identities"][0]["pass"], serde_json::Value::Bool(false));

    let (code, _) = run_verify(dir.path(), "bad.json", &["--metric", "nonsense", "--n", "3"]);
    assert_eq!(code, 2);

    let out = bin()
        .args(["verify", "--metric", "ads-fg", "--n", "not-a-number"])
        .output()
        .unwrap();
    assert_eq!(out.status.code().unwrap(), 2);
}

#[test]
fn toroidal_infinity_is_rejected_for_mass() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["mass", "--metric", "ads-soliton", "--n", "4", "--r0", "1"])
        .arg("--output")
        .arg(dir.path().join("sol.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code().unwrap(), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("conformal infinity is not a sphere"),
        "stderr: {err}"
    );
}

#[test]
fn model_space_has_no_mass() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("mass.json");
    let status = bin()
        .args(["mass", "--metric", "ads-fg", "--n", "3"])
        .arg("--output")
        .arg(&out_path)
        .status()
        .unwrap();
    assert_eq!(status.code().unwrap(), 0);
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&out_path).unwrap()).unwrap();
    let scalar = report["mass"]["scalar_mass"].as_f64().unwrap();
    assert!(scalar.abs() < 1e-7, "scalar mass {scalar}");
    assert!(report["mass"]["inequality"].as_bool().unwrap());
}

#[test]
fn csv_format_emits_per_point_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("rows.csv");
    let status = bin()
        .args([
            "verify",
            "--metric",
            "hyperbolic",
            "--n",
            "3",
            "--suite",
            "static",
            "--points",
            "7",
            "--format",
            "csv",
        ])
        .arg("--output")
        .arg(&out_path)
        .status()
        .unwrap();
    assert_eq!(status.code().unwrap(), 0);
    let text = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("identity,point,abs_residual,rel_residual"));
    // Two pointwise identities at seven points each.
    assert_eq!(lines.count(), 14);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.toml");
    std::fs::write(
        &cfg_path,
        "metric = \"schwarzschild-ads\"\nn = 3\nM = 2.0\nsuite = \"divergence\"\npoints = 9\n",
    )
    .unwrap();
    let out_path = dir.path().join("cfg.json");
    let status = bin()
        .args(["verify", "--config"])
        .arg(&cfg_path)
        .args(["--M", "0.5", "--output"])
        .arg(&out_path)
        .status()
        .unwrap();
    assert_eq!(status.code().unwrap(), 0);
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&out_path).unwrap()).unwrap();
    assert_eq!(report["params"]["M"].as_f64(), Some(0.5));
    assert_eq!(report["identities"][0]["points"].as_u64(), Some(9));
}
