use std::path::Path;
use std::process::{Command, Output};

use freemoments::wavefunction::io::write_csv;
use freemoments::wavefunction::Family;
use freemoments_cli::error::CliError;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freemoments"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.toml");
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

/// Parses an evolve CSV into `(u, values, source)` rows.
fn series(csv_text: &str) -> Vec<(f64, Vec<f64>, String)> {
    csv_text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| {
            let cells: Vec<&str> = l.split(',').collect();
            let (last, rest) = cells.split_last().unwrap();
            let nums: Vec<f64> = rest.iter().map(|c| c.parse().unwrap()).collect();
            (nums[0], nums[1..].to_vec(), last.to_string())
        })
        .collect()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1e-300)
}

#[test]
fn analyze_skew_gaussian() {
    let r = json(&["analyze", "skew_gaussian", "b=0.671"]);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["units"]["hbar"], 1.0);
    let omega3 = r["invariants"][1]["invariants"]["z"][2].as_f64().unwrap();
    assert!(close(omega3, -0.0027, 0.02), "{omega3}");
    let g3 = &r["geometry"][0];
    assert_eq!(g3["case"], "MAX_INFLECTION_MIN");
    assert!(close(g3["u0"].as_f64().unwrap(), 1.94, 0.01));
    assert!(r["inequalities"].as_array().unwrap().iter().all(|i| i["satisfied"] == true));
    let m = &r["moments"][2]["methods"];
    for k in 0..4 {
        let (a, b) = (m["operator_ordering"]["values"][k].as_f64().unwrap(), m["wigner"]["values"][k].as_f64().unwrap());
        assert!((a - b).abs() <= 1e-6f64.max(1e-4 * a.abs()));
    }
}

#[test]
fn analyze_gaussian() {
    let r = json(&["analyze", "gaussian", "a=1"]);
    let omega2 = r["invariants"][0]["invariants"]["z"][2].as_f64().unwrap();
    assert!(close(omega2, 0.25, 1e-12));
    assert!(close(r["shape"]["kurtosis"].as_f64().unwrap(), 3.0, 1e-8));
}

#[test]
fn analyze_power_exponential() {
    let r = json(&["analyze", "power_exp", "c=1.51", "b=0.24"]);
    let y4 = &r["moments"][3]["methods"]["closed_form"]["values"];
    assert!((y4[2].as_f64().unwrap() + 0.0088).abs() < 1e-4);
    assert_eq!(r["geometry"][1]["case"], "MIN_MAX_MIN");
    assert!(r["grid"].is_null());
}

#[test]
fn analyze_heavy_tails_report_only_finite_moments() {
    let r = json(&["analyze", "sqrt_exp"]);
    assert!(r["moments"].as_array().unwrap().is_empty());
    assert!(close(r["shape"]["kurtosis"].as_f64().unwrap(), 25.2, 0.01));
    assert_eq!(code(&["evolve", "abs_exp", "--order", "4"]), 2);
}

#[test]
fn evolve_skew_gaussian_order_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[time]\nstart = -3.0\nstop = 3.0\nsteps = 601\n");
    let text = ok(&["--config", &cfg, "evolve", "skew_gaussian", "b=0.671", "--order", "3"]);
    assert!(text.contains("# hbar=1 mass=1 length_scale=1"));
    assert!(text.lines().any(|l| l == "u,Y0,Y1,Y2,Y3,source"));
    let rows = series(&text);
    let closed: Vec<_> = rows.iter().filter(|r| r.2 == "closed_form").collect();
    let grid: Vec<_> = rows.iter().filter(|r| r.2 == "grid").collect();
    assert_eq!(closed.len(), 601);
    assert_eq!(grid.len(), 601);
    let at_zero = closed.iter().find(|r| r.0 == 0.0).unwrap();
    assert!(at_zero.1[0].abs() < 1e-12);
    let argmax = closed.iter().max_by(|a, b| a.1[0].total_cmp(&b.1[0])).unwrap().0;
    let argmin = closed.iter().min_by(|a, b| a.1[0].total_cmp(&b.1[0])).unwrap().0;
    assert!((argmax + 1.94).abs() < 0.011, "{argmax}");
    assert!((argmin - 1.94).abs() < 0.011, "{argmin}");
    for (c, g) in closed.iter().zip(&grid) {
        assert_eq!(c.0, g.0);
        assert!((c.1[0] - g.1[0]).abs() < 1e-8, "u={}", c.0);
    }
}

#[test]
fn evolve_gaussian_order_two_is_a_parabola() {
    for (u, y, _) in series(&ok(&["evolve", "gaussian", "--order", "2"])) {
        assert!((y[0] - (0.25 + u * u)).abs() < 1e-8, "u={u}");
    }
}

#[test]
fn evolve_power_exponential_order_four() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[time]\nstart = -1000.0\nstop = 1000.0\nsteps = 2001\n");
    let rows = series(&ok(&["--config", &cfg, "evolve", "power_exp", "c=1.51", "b=0.24", "--order", "4"]));
    assert!(rows.iter().all(|r| r.2 == "closed_form"));
    // Y0 ~ 1e18 varies by ~1e4 over the range, so read the extrema from the
    // sign changes of Y1 = (1/4) dY0/du instead
    let y1: Vec<f64> = rows.iter().map(|r| r.1[1]).collect();
    let mut extrema = Vec::new();
    for i in 0..y1.len() - 1 {
        let (lo, hi) = (rows[i].0, rows[i + 1].0);
        if y1[i] <= 0.0 && y1[i + 1] > 0.0 {
            extrema.push(("min", lo, hi));
        } else if y1[i] >= 0.0 && y1[i + 1] < 0.0 {
            extrema.push(("max", lo, hi));
        }
    }
    let expected = [("min", -637.06), ("max", 0.0), ("min", 637.06)];
    assert_eq!(extrema.len(), 3, "{extrema:?}");
    for ((kind, lo, hi), (want, at)) in extrema.iter().zip(expected) {
        assert_eq!(*kind, want);
        assert!(*lo - 1e-9 <= at && at <= *hi + 1e-9, "{kind} in [{lo}, {hi}], expected {at}");
    }
}

#[test]
fn classify_examples() {
    let labels = |args: &[&str]| -> Vec<String> {
        json(args)["classifications"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| c["report"]["case"].as_str().unwrap().to_string())
            .collect()
    };
    assert_eq!(labels(&["classify", "y=0,0,0,1"]), ["MONOTONE_INFLECTION"]);
    assert_eq!(labels(&["classify", "skew_gaussian", "b=0.671", "--order", "3"]), ["MAX_INFLECTION_MIN"]);
    assert_eq!(labels(&["classify", "power_exp", "c=1.51", "b=0.24", "--order", "4"]), ["MIN_MAX_MIN"]);
    let degenerate = json(&["classify", "y=1,0,2,0"]);
    assert!(degenerate["classifications"][0]["note"].as_str().unwrap().contains("degenerate"));
}

#[test]
fn classify_reads_moment_files() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("y.json");
    std::fs::write(&p, r#"{"order":4,"values":[1.0,0.0,-1.0,0.0,1.0],"mass":1.0,"hbar":1.0}"#).unwrap();
    let r = json(&["classify", &format!("moments={}", p.display())]);
    assert_eq!(r["classifications"][0]["report"]["case"], "MIN_MAX_MIN");
}

#[test]
fn verify_suites_pass() {
    for suite in ["invariance", "classical", "inequalities", "oracle"] {
        let out = run(&["verify", suite, "--seed", "7"]);
        assert_eq!(out.status.code(), Some(0), "{suite}: {}", String::from_utf8_lossy(&out.stdout));
        assert!(String::from_utf8_lossy(&out.stdout).contains("all checks passed"));
    }
    let log = json(&["verify", "classical", "--seed", "7", "--format", "json"]);
    assert_eq!(log["passed"], true);
    assert_eq!(log["seed"], 7);
    let worst = log["checks"][0]["worst"].as_f64().unwrap();
    assert!(worst <= 0.0, "min classical Omega4 must not be negative");
}

#[test]
fn verification_failure_exit_code() {
    assert_eq!(CliError::Verify("x".into()).exit_code(), 3);
}

#[test]
fn usage_and_numeric_exit_codes() {
    assert_eq!(code(&[]), 1);
    assert_eq!(code(&["analyze"]), 1);
    assert_eq!(code(&["analyze", "lorentzian"]), 1);
    assert_eq!(code(&["analyze", "gaussian", "a=-1"]), 1);
    assert_eq!(code(&["evolve", "gaussian", "--order", "5"]), 1);
    assert_eq!(code(&["--format", "xml", "analyze", "gaussian"]), 1);
    assert_eq!(code(&["--config", "/nonexistent.toml", "analyze", "gaussian"]), 1);
    assert_eq!(code(&["--help"]), 0);

    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[grid]\npoints = 256\nextent = 8.0\n");
    let out = run(&["--config", &cfg, "evolve", "gaussian", "--order", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("grid evolution at u=") && err.contains("boundary"), "{err}");
    let bad = write_config(dir.path(), "[grid]\npoints = 300\nextent = 8.0\n");
    assert_eq!(code(&["--config", &bad, "analyze", "gaussian"]), 1);
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["evolve", "skew_gaussian", "b=0.671"][..],
        &["analyze", "skew_gaussian", "b=0.3"][..],
        &["ensemble", "random", "n=20000", "--seed", "4"][..],
        &["verify", "classical", "--seed", "11", "--format", "json"][..],
    ] {
        assert_eq!(ok(args), ok(args), "{args:?}");
    }
}

#[test]
fn configured_units_and_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("series.csv");
    let cfg = write_config(
        dir.path(),
        &format!(
            "hbar = 2.0\nmass = 3.0\nlength_scale = 0.5\n[grid]\npoints = 4096\nextent = 200.0\n[time]\nstart = -1.0\nstop = 1.0\nsteps = 5\n[output]\npath = \"{}\"\n",
            out.display()
        ),
    );
    assert_eq!(ok(&["--config", &cfg, "evolve", "gaussian", "--order", "2"]), "");
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("# hbar=2 mass=3 length_scale=0.5"));
    assert!(text.contains("# state=gaussian a=0.5"));
    // Y0 = a^2/4 + (hbar u / a)^2 with u = t/m for the Gaussian of width a
    for (u, y, _) in series(&text) {
        let expected = 0.0625 + (2.0 * u / 0.5).powi(2);
        assert!((y[0] - expected).abs() < 1e-8 * expected.max(1.0), "u={u}: {} vs {expected}", y[0]);
    }

    let json_out = dir.path().join("r.json");
    ok(&["--config", &cfg, "--format", "json", "--out", json_out.to_str().unwrap(), "analyze", "gaussian"]);
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&json_out).unwrap()).unwrap();
    assert_eq!(r["units"]["length_scale"], 0.5);
    assert!(close(r["invariants"][0]["invariants"]["z"][2].as_f64().unwrap(), 1.0, 1e-10));
}

#[test]
fn analyze_wavefunction_file_matches_family() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("psi.csv");
    let psi = Family::SkewGaussian { b: 0.671, a: 1.0 }.build(None, 1.0, 1.0).unwrap();
    write_csv(&psi, std::fs::File::create(&p).unwrap()).unwrap();
    let from_file = json(&["analyze", &format!("file={}", p.display()), "--order", "3"]);
    let from_family = json(&["analyze", "skew_gaussian", "b=0.671", "--order", "3"]);
    let a = from_file["moments"][2]["methods"]["operator_ordering"]["values"].clone();
    let b = from_family["moments"][2]["methods"]["operator_ordering"]["values"].clone();
    for k in 0..4 {
        assert!((a[k].as_f64().unwrap() - b[k].as_f64().unwrap()).abs() < 1e-10);
    }
    assert_eq!(from_file["geometry"][0]["case"], "MAX_INFLECTION_MIN");
}

#[test]
fn ensemble_from_csv_flags_classical_violations() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("e.csv");
    std::fs::write(&p, "x,p\n0,0\n0.001,0\n0,0.001\n0.001,0.001\n").unwrap();
    let r = json(&["ensemble", p.to_str().unwrap()]);
    assert_eq!(r["particles"], 4);
    let s = &r["inequalities"][0];
    assert_eq!(s["name"], "SCHRODINGER_2");
    assert_eq!(s["satisfied"], false);
    assert_eq!(s["provenance"], "classical");
    assert!(r["omega4"]["value"].as_f64().unwrap() >= -1e-12 * r["omega4"]["scale"].as_f64().unwrap());
    assert_eq!(code(&["ensemble", dir.path().join("missing.csv").to_str().unwrap()]), 1);
}

#[test]
fn csv_reports_flatten() {
    let text = ok(&["--format", "csv", "classify", "y=0,0,0,1"]);
    assert!(text.starts_with("key,value\n"));
    assert!(text.contains("classifications.0.report.case,MONOTONE_INFLECTION"));
}
