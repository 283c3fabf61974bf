use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn flaglab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flaglab")).args(args).output().expect("spawn flaglab")
}

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("run.toml");
    std::fs::write(&p, body).unwrap();
    p.display().to_string()
}

fn report(dir: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn runs_write_reports_with_stable_hashes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = configs().join("cartan.toml").display().to_string();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for out in [&a, &b] {
        let o = flaglab(&["cartan", "--config", &cfg, "--out", out.to_str().unwrap(), "--quiet"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(o.stdout.is_empty());
    }
    let (ra, rb) = (report(&a), report(&b));
    assert_eq!(ra["determinismHash"], rb["determinismHash"]);
    assert_eq!(ra["subcommand"], "cartan");
    for f in ra["files"].as_array().unwrap() {
        let name = f["path"].as_str().unwrap();
        assert_eq!(std::fs::read(a.join(name)).unwrap(), std::fs::read(b.join(name)).unwrap());
    }
}

#[test]
fn seed_changes_the_hash() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = configs().join("contract_random_xi.toml").display().to_string();
    let mut hashes = Vec::new();
    for seed in ["0", "1"] {
        let out = tmp.path().join(seed);
        let o = flaglab(&["contract", "--config", &cfg, "--out", out.to_str().unwrap(), "--seed", seed, "--quiet"]);
        assert!(o.status.success());
        hashes.push(report(&out)["determinismHash"].clone());
    }
    assert_ne!(hashes[0], hashes[1]);
}

#[test]
fn invalid_config_exits_2_with_line() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "seed = 0\ndepth = 3\n\n[group]\npreset = \"diag-sl3\"\n\n[contract]\nk = 7\n");
    let o = flaglab(&["contract", "--config", &cfg, "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("run.toml:8:"), "{err}");
}

#[test]
fn unknown_key_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "seed = 0\nbogus = 1\n");
    let o = flaglab(&["cartan", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("run.toml:2:"));
}

#[test]
fn missing_seed_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "depth = 3\n");
    let o = flaglab(&["cartan", "--config", &cfg, "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    // Not loxodromic: no weight split exists at α₁.
    let cfg = write_config(
        tmp.path(),
        "seed = 0\n\n[group]\ngenerators = [{ name = \"a\", matrix = [1.0, 0.0, 0.0, 1.0] }]\n\n[contract]\nxi = [[1.0, 1.0]]\n",
    );
    let out = tmp.path().join("out");
    let o = flaglab(&["contract", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!out.join("report.json").exists());
}

#[test]
fn extended_precision_reaches_below_double_floor() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "seed = 0\n\n[group]\npreset = \"diag-sl3\"\n\n[contract]\nxi = [[1.0, 1.0, 1.0]]\nprecision_bits = 256\nwindow = [1e-60, 1e-2]\n",
    );
    let out = tmp.path().join("out");
    let o = flaglab(&["contract", "--config", &cfg, "--out", out.to_str().unwrap(), "--quiet"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out);
    let first = &r["results"]["first"];
    assert!(first["points_used"].as_u64().unwrap() > 90);
    assert!((first["slope"].as_f64().unwrap() + 4f64.ln()).abs() < 1e-12);
}

#[test]
fn deep_window_without_extended_precision_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "seed = 0\n\n[group]\npreset = \"diag-sl3\"\n\n[contract]\nxi = [[1.0, 1.0, 1.0]]\nwindow = [1e-60, 1e-2]\n",
    );
    let o = flaglab(&["contract", "--config", &cfg, "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
