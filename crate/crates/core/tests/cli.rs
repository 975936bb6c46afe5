use std::path::Path;
use std::process::{Command, Output};

use duopoly_core::output::format_sig;
use serde_json::Value;

const SET_A: &str = r#"{"q": 0.3, "s": 40, "t1": 0.16, "c1": 0.2, "c2": 2,
    "k1": 0.05, "k2": 0.01, "h1": 0.05, "h2": 0.01}"#;
const SET_B: &str = r#"{"q": 0.3, "s": 40, "t1": 0.16, "c1": 0.2, "c2": 1.5,
    "k1": 0.05, "k2": 0.01, "h1": 0.05, "h2": 0.01}"#;

fn duopoly(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_duopoly"))
        .args(args)
        .output()
        .unwrap()
}

fn config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn equilibrium_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "b.json", SET_B);
    let v = json(&duopoly(&["--config", &cfg, "equilibrium"]));
    assert!((v["x1_star"].as_f64().unwrap() - 0.4359).abs() < 1e-4);
    assert!((v["z2_star"].as_f64().unwrap() - 0.059313).abs() < 1e-4);
    assert_eq!(v["feasible"], true);
    assert!(v["foc_residual_max"].as_f64().unwrap() < 1e-10);
}

#[test]
fn hopf_report() {
    let dir = tempfile::tempdir().unwrap();
    let a = config(dir.path(), "a.json", SET_A);
    let b = config(dir.path(), "b.json", SET_B);
    let va = json(&duopoly(&["hopf", "-c", &a]));
    assert_eq!(va["classification"], "StableUntilTau0");
    assert!(va["tau0"].as_f64().unwrap() > 0.0);
    assert_eq!(va["transversality_sign"], 1);
    let vb = json(&duopoly(&["hopf", "-c", &b]));
    assert_eq!(vb["classification"], "StableForAllDelays");
    assert!(vb["crossings"].as_array().unwrap().is_empty());
}

#[test]
fn stability_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "a.json", SET_A);
    let v = json(&duopoly(&["stability", "-c", &cfg]));
    assert_eq!(v["stable"], true);
    assert_eq!(v["routh_hurwitz"]["stable"], true);
    assert!(v["max_real_part"].as_f64().unwrap() < 0.0);
}

#[test]
fn simulate_without_delay_matches_zero_delay() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "a.json", SET_A);
    let absent = duopoly(&["simulate", "-c", &cfg, "--t-end", "50"]);
    let zero = duopoly(&["simulate", "-c", &cfg, "--t-end", "50", "--tau", "0"]);
    assert!(absent.status.success());
    assert_eq!(absent.stdout, zero.stdout);
    let text = String::from_utf8(absent.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("t,x1,x2,z1,z2"));
    assert_eq!(text.lines().count(), 1 + 1001);
}

#[test]
fn simulate_writes_file_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        dir.path(),
        "a.json",
        &SET_A.replace('}', r#", "tau": 30, "step": 0.1, "t_end": 100}"#),
    );
    let first = dir.path().join("one.csv");
    let second = dir.path().join("two.csv");
    for path in [&first, &second] {
        let out = duopoly(&["simulate", "-c", &cfg, "-o", path.to_str().unwrap()]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(out.stdout.is_empty());
    }
    let a = std::fs::read_to_string(&first).unwrap();
    assert_eq!(a, std::fs::read_to_string(&second).unwrap());

    // every value survives a parse/format round trip at 12 significant digits
    for line in a.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 5);
        for f in fields {
            let x: f64 = f.parse().unwrap();
            assert_eq!(format_sig(x), f);
        }
    }
}

#[test]
fn sweep_preset_and_explicit_range() {
    let preset = duopoly(&["sweep", "--preset", "section2"]);
    assert!(preset.status.success());
    let text = String::from_utf8(preset.stdout).unwrap();
    assert_eq!(text.lines().count(), 201);

    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "a.json", SET_A);
    let out = duopoly(&[
        "sweep", "-c", &cfg, "--from", "10", "--to", "20", "--steps", "11",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 11);
    assert!(rows[0].starts_with("10,") && rows[10].starts_with("20,"));
}

#[test]
fn failures_exit_nonzero_with_message() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (
            config(dir.path(), "bad_q.json", &SET_A.replace("0.3", "0")),
            "q",
        ),
        (
            config(
                dir.path(),
                "extra.json",
                &SET_A.replace('}', r#", "r": 1}"#),
            ),
            "unknown field",
        ),
        (config(dir.path(), "syntax.json", "{"), "malformed"),
        (
            config(
                dir.path(),
                "infeasible.json",
                &SET_A.replace("\"c2\": 2", "\"c2\": 5"),
            ),
            "c2",
        ),
    ];
    for (cfg, needle) in &cases {
        let out = duopoly(&["hopf", "-c", cfg]);
        assert!(!out.status.success(), "{cfg}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.starts_with("error:") && err.contains(needle), "{err}");
    }
    assert!(!duopoly(&["hopf"]).status.success());
    assert!(!duopoly(&["hopf", "-c", "/nonexistent/config.json"])
        .status
        .success());
}

#[test]
fn singular_simulation_writes_partial_output_and_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        dir.path(),
        "collapse.json",
        r#"{"q": 0.3, "s": 40, "t1": 0.16, "c1": 5, "c2": 5,
            "k1": 50, "k2": 50, "h1": 1, "h2": 1,
            "x10": 0.05, "x20": 0.001, "z10": 0, "z20": 0}"#,
    );
    let out = duopoly(&["simulate", "-c", &cfg, "--t-end", "100"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("price singularity"));
    assert!(String::from_utf8(out.stdout).unwrap().lines().count() > 1);
}
