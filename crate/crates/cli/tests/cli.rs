use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wulffcap"))
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn verify(config: &Path, extra: &[&str]) -> Output {
    bin().arg("verify").arg("--config").arg(config).args(extra).output().unwrap()
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn check<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap_or_else(|| panic!("no {name}"))
}

const HEMISPHERE: &str = r#"{
  "schema": 1,
  "anisotropy": {"family": "isotropic"},
  "omega0": 0,
  "surface": {"kind": "wulff-cap", "radius": 1},
  "resolutions": [64, 128],
  "checks": ["minkowski", "hk"]
}"#;

#[test]
fn hemisphere_is_the_equality_case() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "c.json", HEMISPHERE);
    let out_dir = dir.path().join("out");
    let out = verify(&config, &["--output", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out_dir);
    assert_eq!(r["pass"], true);
    let ratio = check(&r, "hk")["values"]["ratio"].as_f64().unwrap();
    assert!((ratio - 1.0).abs() <= 1e-6, "{ratio}");
    assert_eq!(check(&r, "hk")["convergence"].as_array().unwrap().len(), 2);
    for name in ["metadata.json", "convergence_hk.csv", "convergence_minkowski_r1.csv", "convergence_minkowski_r2.csv"] {
        assert!(out_dir.join(name).exists(), "{name}");
    }
    let table = std::fs::read_to_string(out_dir.join("convergence_hk.csv")).unwrap();
    assert!(table.starts_with("resolution,residual,relative_residual\n64x64,"));
    let meta: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("metadata.json")).unwrap()).unwrap();
    assert_eq!(meta["checks"].as_array().unwrap().len(), 2);
}

#[test]
fn full_suite_on_a_perturbed_cap() {
    let text = r#"{
      "schema": 1,
      "anisotropy": {"family": "linear-perturbation", "direction": [0.6666666666666666, 0.3333333333333333, 0.6666666666666666], "epsilon": 0.1},
      "omega0": -0.4,
      "surface": {"kind": "perturbed-cap", "radius": 1, "amplitude": 0.05},
      "resolutions": [32, 64],
      "checks": "all",
      "budgets": {"sweepout_samples": 2000, "angle_trials": 20000}
    }"#;
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "c.json", text);
    let out_dir = dir.path().join("out");
    let out = verify(&config, &["--output", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out_dir);
    let names: Vec<&str> = r["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(
        names[..11],
        ["gauge", "angle", "structural", "minkowski_r1", "minkowski_r2", "first_variation", "hk", "parallel", "sweepout", "elliptic", "maclaurin_r2"]
    );
    assert!(names[11].starts_with("ros_chain"), "{names:?}");
    let fine = check(&r, "hk")["values"]["ratio"].as_f64().unwrap();
    assert!(fine > 1.0 + 1e-4, "{fine}");
    assert!(out_dir.join("sweepout.csv").exists());

    // The HK margin is resolution-stable.
    let coarse_dir = dir.path().join("coarse");
    let out = verify(&config, &["--check", "hk", "--resolution", "48", "--output", coarse_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let coarse = check(&report(&coarse_dir), "hk")["values"]["ratio"].as_f64().unwrap();
    assert!((coarse - fine).abs() < 1e-6, "{coarse} vs {fine}");
}

#[test]
fn omega0_outside_the_admissible_range_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "c.json", &HEMISPHERE.replace("\"omega0\": 0", "\"omega0\": 1.5"));
    let out_dir = dir.path().join("out");
    let out = verify(&config, &["--output", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("admissible range (-1, 1)"), "{stderr}");
    assert!(!out_dir.exists());
}

#[test]
fn configuration_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in [
        ("unknown.json", HEMISPHERE.replace("\"schema\": 1", "\"schema\": 1, \"verbose\": true")),
        ("order.json", HEMISPHERE.replace("[64, 128]", "[128, 64]")),
        ("check.json", HEMISPHERE.replace("\"hk\"]", "\"hk-closed\"]")),
        ("syntax.json", "{\"schema\": 1,".to_string()),
    ] {
        let config = write_config(dir.path(), name, &text);
        let out = verify(&config, &[]);
        assert_eq!(out.status.code(), Some(2), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let err: Value = serde_json::from_slice(out.stderr.trim_ascii_end()).unwrap();
        assert_eq!(err["error"], "config", "{name}");
    }
    let out = verify(&dir.path().join("missing.json"), &[]);
    assert_eq!(out.status.code(), Some(2));
    let out = bin().arg("verify").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn hypothesis_violation_exits_1_without_output() {
    let text = r#"{
      "schema": 1,
      "anisotropy": {"family": "isotropic"},
      "surface": {"kind": "perturbed-cap", "radius": 1, "amplitude": -0.9, "frequency": 0, "cutoff_power": 6},
      "resolutions": [16],
      "checks": ["structural", "hk"]
    }"#;
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "c.json", text);
    let out_dir = dir.path().join("out");
    let out = verify(&config, &["--output", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(out.stderr.trim_ascii_end()).unwrap();
    assert_eq!(err["error"], "hypothesis-violation");
    assert_eq!(err["check"], "hk");
    assert!(!err["nodes"].as_array().unwrap().is_empty());
    assert!(!out_dir.exists());
}

#[test]
fn failing_check_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let text = HEMISPHERE.replace("[64, 128]", "[8]").replace("\"checks\"", "\"tolerances\": {\"minkowski\": 1e-300}, \"checks\"");
    let config = write_config(dir.path(), "c.json", &text);
    let out = verify(&config, &[]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["pass"], false);
}

#[test]
fn list_checks_names_every_check() {
    let out = bin().arg("list-checks").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["gauge", "angle", "structural", "minkowski", "first-variation", "hk", "hk-closed", "parallel", "sweepout", "elliptic", "maclaurin"] {
        assert!(text.lines().any(|l| l.starts_with(&format!("{name} "))), "{name}");
    }
    let out = bin().args(["list-checks", "--json"]).output().unwrap();
    let catalog: Value = serde_json::from_slice(&out.stdout).unwrap();
    let hk = catalog.as_array().unwrap().iter().find(|e| e["name"] == "hk").unwrap();
    assert!(hk["anchor"].as_str().unwrap().contains("Heintze-Karcher"));
    let sweepout = catalog.as_array().unwrap().iter().find(|e| e["name"] == "sweepout").unwrap();
    assert!(sweepout["anchor"].as_str().unwrap().contains("sweepout"));
}

#[test]
fn exported_mesh_can_be_verified_as_a_custom_chart() {
    let dir = tempfile::tempdir().unwrap();
    let text = HEMISPHERE.replace("\"omega0\": 0", "\"omega0\": 0.4").replace("[64, 128]", "[16, 32]");
    let config = write_config(dir.path(), "c.json", &text);
    let csv = dir.path().join("mesh.csv");
    let out = bin().arg("export-mesh").arg("--config").arg(&config).arg("--output").arg(&csv).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let first = std::fs::read(&csv).unwrap();
    bin().arg("export-mesh").arg("--config").arg(&config).arg("--output").arg(&csv).output().unwrap();
    assert_eq!(std::fs::read(&csv).unwrap(), first);

    let custom = r#"{
      "schema": 1,
      "anisotropy": {"family": "isotropic"},
      "omega0": 0.4,
      "surface": {"kind": "custom-chart-file", "path": "mesh.csv"},
      "checks": ["structural", "minkowski", "hk", "sweepout"],
      "budgets": {"sweepout_samples": 500}
    }"#;
    let custom = write_config(dir.path(), "custom.json", custom);
    let out = verify(&custom, &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(check(&r, "hk")["resolution"], serde_json::json!([32, 32]));
    let ratio = check(&r, "hk")["values"]["ratio"].as_f64().unwrap();
    assert!((ratio - 1.0).abs() < 1e-6);
}

#[test]
fn identical_configs_give_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let text = HEMISPHERE
        .replace("\"omega0\": 0", "\"omega0\": -0.4")
        .replace("[64, 128]", "[16, 32]")
        .replace("\"checks\": [\"minkowski\", \"hk\"]", "\"checks\": \"all\", \"budgets\": {\"sweepout_samples\": 500, \"angle_trials\": 5000}");
    let config = write_config(dir.path(), "c.json", &text);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(verify(&config, &["--output", a.to_str().unwrap()]).status.code(), Some(0));
    let out = bin()
        .env("WULFFCAP_THREADS", "1")
        .arg("verify")
        .arg("--config")
        .arg(&config)
        .args(["--output", b.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read(a.join("report.json")).unwrap(), std::fs::read(b.join("report.json")).unwrap());
    assert_eq!(std::fs::read(a.join("sweepout.csv")).unwrap(), std::fs::read(b.join("sweepout.csv")).unwrap());
    let meta: Value = serde_json::from_str(&std::fs::read_to_string(b.join("metadata.json")).unwrap()).unwrap();
    assert_eq!(meta["threads"], 1);

    let out = bin().env("WULFFCAP_THREADS", "zero").arg("list-checks").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seed_override_changes_sampling_only() {
    let dir = tempfile::tempdir().unwrap();
    let text = HEMISPHERE.replace("[64, 128]", "[16]").replace("[\"minkowski\", \"hk\"]", "[\"gauge\"]");
    let config = write_config(dir.path(), "c.json", &text);
    let a = verify(&config, &["--seed", "1"]);
    let b = verify(&config, &["--seed", "2"]);
    let ra: Value = serde_json::from_slice(&a.stdout).unwrap();
    let rb: Value = serde_json::from_slice(&b.stdout).unwrap();
    assert_eq!(ra["config"]["seed"], 1);
    assert_eq!(rb["config"]["seed"], 2);
    assert_eq!(ra["pass"], true);
    assert_eq!(rb["pass"], true);
}
