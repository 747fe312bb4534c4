use std::path::Path;
use std::process::{Command, Output};

use fracws::spectrum::classical_eps;
use fracws::MiddleSign;
use serde_json::Value;

// β = 25.0, q = 1, γ = 0 with μ = 939 MeV: V0 = 25 ħ²(2β1)²/(2μ)
const FEASIBLE: &[&str] = &["--v0", "1226.75", "--q", "1", "--c", "0", "--beta1", "0.7692307692307692"];

fn fracws(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracws"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fracws_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracws"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn meta(text: &str, key: &str) -> Option<String> {
    let prefix = format!("# {key}=");
    text.lines().find_map(|l| l.strip_prefix(&prefix).map(str::to_string))
}

fn header(text: &str) -> &str {
    text.lines().find(|l| !l.starts_with('#')).unwrap()
}

fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn with_args<'a>(base: &[&'a str], extra: &[&'a str]) -> Vec<&'a str> {
    base.iter().chain(extra).copied().collect()
}

#[test]
fn potential_headers_and_surface_term() {
    let plain = stdout(&fracws(&["potential", "--c", "0", "--points", "241"]));
    let surf = stdout(&fracws(&["potential", "--points", "241"]));
    assert_eq!(header(&plain), "r_fm,V_MeV");
    let p = rows(&plain);
    let s = rows(&surf);
    assert_eq!(p.len(), 241);
    assert_eq!(p[0][0].parse::<f64>().unwrap(), 0.0);

    let radius: f64 = meta(&plain, "radius_fm").unwrap().parse().unwrap();
    let v0: f64 = meta(&plain, "v0_MeV").unwrap().parse().unwrap();
    let r_arg = format!("{radius:.17e}");
    let at_r = stdout(&fracws(&["potential", "--c", "0", "--points", "2", "--r-max", &r_arg]));
    let v_r: f64 = rows(&at_r)[1][1].parse().unwrap();
    assert!((v_r + v0 / 2.0).abs() < 0.005 * v0 / 2.0, "{v_r}");

    for (a, b) in p.iter().zip(&s) {
        let vp: f64 = a[1].parse().unwrap();
        let vs: f64 = b[1].parse().unwrap();
        assert!(vs < vp);
    }
}

#[test]
fn invalid_flags_exit_two() {
    for args in [
        &["potential", "--r-max", "-1"][..],
        &["potential", "--r-max", "0"],
        &["potential", "--points", "1"],
        &["spectrum", "--alpha", "1.5"],
        &["spectrum", "--v0", "50"],
        &["spectrum", "--v0", "50", "--q", "1", "--beta1", "0.5", "--a-mass", "40"],
        &["wavefunction", "--r-space", "--alpha", "0.9"],
        &["scan-alpha", "--alpha-min", "0.9", "--alpha-max", "0.8"],
        &["potential", "--bogus"],
    ] {
        let out = fracws(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn reference_spectrum_is_empty_with_explanation() {
    let text = stdout(&fracws(&["spectrum"]));
    assert_eq!(header(&text), "n,eps_n,E_MeV,feasible,residual");
    assert!(rows(&text).is_empty());
    assert_eq!(meta(&text, "levels").as_deref(), Some("0"));
    assert_eq!(meta(&text, "stopped_at_n").as_deref(), Some("0"));
    assert!(meta(&text, "feasibility").unwrap().contains("no certified level"));
}

#[test]
fn explicit_spectrum_matches_classical_closed_form() {
    let text = stdout(&fracws(&with_args(&["spectrum", "--n-max", "6"], FEASIBLE)));
    let beta: f64 = meta(&text, "beta_pot").unwrap().parse().unwrap();
    let levels = rows(&text);
    // Λ_n = 2 + 2n ≤ 2√β admits n = 0..3
    assert_eq!(levels.len(), 4);
    for (n, row) in levels.iter().enumerate() {
        assert_eq!(row[0], n.to_string());
        assert_eq!(row[3], "true");
        let eps: f64 = row[1].parse().unwrap();
        let want = classical_eps(n, 1.0, beta, 0.0, MiddleSign::Plus).unwrap();
        assert!((eps - want).abs() < 1e-8 * want, "n={n}: {eps} vs {want}");
    }
}

#[test]
fn output_is_deterministic() {
    let args = with_args(&["spectrum", "--alpha", "0.9", "--beta-frac", "0.95"], FEASIBLE);
    assert_eq!(fracws(&args).stdout, fracws(&args).stdout);
    let scan = with_args(&["scan-alpha", "--steps", "5"], FEASIBLE);
    assert_eq!(fracws(&scan).stdout, fracws(&scan).stdout);
}

#[test]
fn json_shape() {
    let text = stdout(&fracws(&with_args(&["spectrum", "--format", "json"], FEASIBLE)));
    let v: Value = serde_json::from_str(&text).unwrap();
    assert!(v["meta"].is_object());
    let rows = v["rows"].as_array().unwrap();
    assert!(!rows.is_empty());
    for key in ["n", "eps_n", "E_MeV", "feasible", "residual"] {
        assert!(rows[0].get(key).is_some(), "{key}");
    }
    assert!(rows[0]["E_MeV"].as_f64().unwrap() < 0.0);
}

#[test]
fn wavefunction_columns() {
    let x = stdout(&fracws(&with_args(&["wavefunction", "--points", "50"], FEASIBLE)));
    assert_eq!(header(&x), "x,R");
    assert_eq!(rows(&x).len(), 50);
    let r = stdout(&fracws(&with_args(&["wavefunction", "--r-space", "--points", "50"], FEASIBLE)));
    assert_eq!(header(&r), "r_fm,R");
    let frac = stdout(&fracws(&with_args(&["wavefunction", "--alpha", "0.9", "--n", "1"], FEASIBLE)));
    assert!(rows(&frac).iter().all(|row| row[1].parse::<f64>().unwrap().is_finite()));
}

#[test]
fn scan_alpha_ends_at_classical_spectrum() {
    let scan = stdout(&fracws(&with_args(&["scan-alpha", "--steps", "4", "--n", "1"], FEASIBLE)));
    assert_eq!(header(&scan), "alpha,eps_n,E_MeV");
    let last = rows(&scan).pop().unwrap();
    assert_eq!(last[0].parse::<f64>().unwrap(), 1.0);
    let spec = stdout(&fracws(&with_args(&["spectrum", "--n-max", "1"], FEASIBLE)));
    let level1 = &rows(&spec)[1];
    assert_eq!(last[1], level1[1]);
    assert_eq!(last[2], level1[2]);
}

#[test]
fn scan_alpha_reports_infeasible_points() {
    let text = stdout(&fracws(&["scan-alpha", "--steps", "3"]));
    assert!(rows(&text).is_empty());
    assert_eq!(meta(&text, "feasible_count").as_deref(), Some("0"));
    assert!(meta(&text, "infeasible_alpha").is_some());
    assert!(meta(&text, "feasibility_boundary").unwrap().contains("infeasible"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"c": 0.0, "points": 11, "r_max": 10.0}"#).unwrap();
    let cfg = cfg.to_str().unwrap();
    let text = stdout(&fracws(&["potential", "--config", cfg, "--points", "21"]));
    assert_eq!(rows(&text).len(), 21);
    assert_eq!(meta(&text, "c_MeV").unwrap().parse::<f64>().unwrap(), 0.0);
    assert_eq!(rows(&text).last().unwrap()[0].parse::<f64>().unwrap(), 10.0);

    std::fs::write(dir.path().join("bad.json"), r#"{"pionts": 3}"#).unwrap();
    let bad = dir.path().join("bad.json");
    assert_eq!(fracws(&["potential", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.csv");
    let out = fracws(&["potential", "--points", "5", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(header(&std::fs::read_to_string(&path).unwrap()), "r_fm,V_MeV");
}

#[test]
fn verify_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracws_in(dir.path(), &["verify", "--n-max", "4"]);
    let table = stdout(&out);
    assert!(table.contains("overall: PASS"));
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("verify-report.json")).unwrap()).unwrap();
    assert!(report["discrepancies"].as_array().unwrap().len() >= 6);
    assert!(report["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true || c["gated"] == false));
}
