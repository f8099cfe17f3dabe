use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

/// Rounded tail index of the two-atom Kesten measure.
#[allow(clippy::approx_constant)]
const QUOTED_CHI: f64 = 0.5235;
use tempfile::TempDir;

const KESTEN_D1: &str = r#"{ "d": 1, "atoms": [ { "p": 0.5, "a": 0.3333333333333333, "b": 1 }, { "p": 0.5, "a": 2, "b": 1 } ] }"#;
const CANTOR: &str = r#"{ "d": 1, "atoms": [ { "p": 0.5, "a": 0.3333333333333333, "b": 1 }, { "p": 0.5, "a": 0.5, "b": 1 } ] }"#;
const DOUBLING: &str = r#"{ "d": 1, "atoms": [ { "p": 1, "a": 2, "b": 1 } ] }"#;

fn setup(measure: &str, extra: &str) -> (TempDir, PathBuf) {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("m.json"), measure).unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, format!("measure = \"m.json\"\nseed = 11\n{extra}")).unwrap();
    (dir, cfg)
}

fn kesten(args: &[&str], cfg: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kesten"))
        .args(args)
        .arg("--config")
        .arg(cfg)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn diagnostic(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const SMALL: &str = "[sample]\nn_samples = 20000\n[spectral]\nlyapunov_steps = 2000\nlyapunov_trials = 8\n";

#[test]
fn validate_accepts_reference_measure() {
    let (dir, cfg) = setup(KESTEN_D1, "");
    let o = kesten(&["validate"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(diagnostic(&o)["status"], "valid");
}

#[test]
fn validate_rejects_unnormalized_weights() {
    let m = r#"{ "d": 1, "atoms": [ { "p": 0.5, "a": 0.5, "b": 1 }, { "p": 0.6, "a": 2, "b": -1 } ] }"#;
    let (dir, cfg) = setup(m, "");
    let o = kesten(&["validate"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(diagnostic(&o)["code"], "WeightsNotNormalized");
}

#[test]
fn validate_rejects_singular_matrix() {
    let m = r#"{ "d": 2, "atoms": [ { "p": 0.5, "a": [[1, 2], [2, 4]], "b": [1, 0] }, { "p": 0.5, "a": [[0.5, 0], [0, 0.5]], "b": [0, 1] } ] }"#;
    let (dir, cfg) = setup(m, "");
    let o = kesten(&["validate"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(diagnostic(&o)["code"], "SingularMatrix");
}

#[test]
fn config_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "measure = \"m.json\"\n").unwrap();
    let o = kesten(&["validate"], &cfg, dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(diagnostic(&o)["code"], "ConfigParse");

    let (dir, cfg) = setup(KESTEN_D1, "[sample]\ntol = 2.0\n");
    let o = kesten(&["sample"], &cfg, dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(diagnostic(&o)["code"], "ParameterOutOfRange");
}

#[test]
fn spectral_reports_chi() {
    let (dir, cfg) = setup(KESTEN_D1, "");
    let out = dir.path().join("out");
    let o = kesten(&["spectral"], &cfg, &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let p = read_json(&out.join("spectral.json"));
    let chi = p["chi"]["chi"].as_f64().unwrap();
    assert!((0.5f64.mul_add((1.0f64 / 3.0).powf(chi), 0.5 * 2f64.powf(chi)) - 1.0).abs() < 1e-6);
    assert!((chi - QUOTED_CHI).abs() < 1e-3);
    let csv = fs::read_to_string(out.join("k_curve.csv")).unwrap();
    assert!(csv.starts_with("s,k,stderr\n0.0,1.0,"));
}

#[test]
fn spectral_without_root_exits_3_and_keeps_alpha() {
    let (dir, cfg) = setup(CANTOR, "");
    let out = dir.path().join("out");
    let o = kesten(&["spectral"], &cfg, &out);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(diagnostic(&o)["code"], "NoRootBelowCap");
    let p = read_json(&out.join("spectral.json"));
    let alpha = p["alpha"].as_f64().unwrap();
    let se = p["alpha_stderr"].as_f64().unwrap();
    assert!((alpha + 0.5 * 6f64.ln()).abs() <= 3.0 * se + 1e-12, "{alpha} ± {se}");
    assert!(out.join("k_curve.csv").exists());
}

#[test]
fn spectral_positive_alpha_exits_3() {
    let (dir, cfg) = setup(DOUBLING, "");
    let o = kesten(&["spectral"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(diagnostic(&o)["code"], "AlphaNotNegative");
}

#[test]
fn sample_and_structure_write_outputs() {
    let (dir, cfg) = setup(KESTEN_D1, SMALL);
    let out = dir.path().join("out");
    assert_eq!(kesten(&["sample"], &cfg, &out).status.code(), Some(0));
    let csv = fs::read_to_string(out.join("samples.csv")).unwrap();
    assert_eq!(csv.lines().count(), 20001);
    let side = read_json(&out.join("samples.json"));
    assert_eq!(side["truncation_failures"], 0);
    assert_eq!(kesten(&["structure"], &cfg, &out).status.code(), Some(0));
    let s = read_json(&out.join("structure.json"));
    assert_eq!(s["d1_case"]["II2"], "PlusInfinity");
    assert!(out.join("fixed_points.csv").exists());
}

#[test]
fn report_passes_on_kesten_measure() {
    let (dir, cfg) = setup(KESTEN_D1, "[sample]\nn_samples = 200000\n");
    let out = dir.path().join("out");
    let o = kesten(&["report"], &cfg, &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let r = read_json(&out.join("report.json"));
    assert_eq!(r["all_pass"], true);
    assert_eq!(r["structure"]["d1_case"]["II2"], "PlusInfinity");
    let hill = r["tails"]["report"]["chi_hill"]["chi_hat"].as_f64().unwrap();
    let chi = r["spectral"]["chi"]["chi"].as_f64().unwrap();
    assert!((hill - chi).abs() <= 0.1 * chi);
    for c in r["checks"].as_array().unwrap() {
        assert!(c["name"].is_string() && c["statistic"].is_number());
    }
    for f in ["tails.json", "radial.csv", "directional.csv", "angular.csv", "durations.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
}

#[test]
fn outputs_are_identical_across_thread_counts() {
    let (dir, cfg) = setup(KESTEN_D1, SMALL);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let c = dir.path().join("c");
    for (out, threads) in [(&a, "1"), (&b, "3"), (&c, "1")] {
        kesten(&["report", "--threads", threads], &cfg, out);
    }
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 10);
    for name in names {
        if name == "durations.json" {
            continue;
        }
        let x = fs::read(a.join(&name)).unwrap();
        assert_eq!(x, fs::read(b.join(&name)).unwrap(), "{name:?} differs across --threads");
        assert_eq!(x, fs::read(c.join(&name)).unwrap(), "{name:?} differs across reruns");
    }
}

#[test]
fn seed_override_changes_samples() {
    let (dir, cfg) = setup(KESTEN_D1, SMALL);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    kesten(&["sample"], &cfg, &a);
    kesten(&["sample", "--seed", "12"], &cfg, &b);
    assert_ne!(fs::read(a.join("samples.csv")).unwrap(), fs::read(b.join("samples.csv")).unwrap());
}

#[test]
fn unwritable_output_exits_5_with_stage() {
    let (dir, cfg) = setup(KESTEN_D1, SMALL);
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let o = kesten(&["structure"], &cfg, &blocker.join("out"));
    assert_eq!(o.status.code(), Some(5));
    let d = diagnostic(&o);
    assert_eq!(d["stage"], "structure");
    assert_eq!(d["code"], "IoError");
}
