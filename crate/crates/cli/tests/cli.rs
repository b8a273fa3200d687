use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cybundle"));
    c.env_remove("CYBUNDLE_BOUND");
    c
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(cmd: &mut Command) -> (i32, String, String) {
    let Output { status, stdout, stderr } = cmd.output().unwrap();
    (status.code().unwrap(), String::from_utf8(stdout).unwrap(), String::from_utf8(stderr).unwrap())
}

const SO10: &str = r#"{"base":"F0","bundle":{"type":"pullback","n":3,"c2E":104,"twist":{"x":1,"alpha":[-1,-1]}},
    "polarization":{"h":1},"require":"W_zero"}"#;

const SPECTRAL_BAD_LAMBDA: &str = r#"{"base":"F0","bundle":{"type":"spectral","n":2,"eta":{"coeffs":[24,24]},"lambda":"1",
    "twist":{"x":0,"alpha":{"coeffs":[1,-11]}}},"polarization":{"H":[3,34]}}"#;

/// Every non-integral number must sit under a key ending in `_approx`.
fn decimals_only_in_approx(v: &Value, key: &str) -> bool {
    match v {
        Value::Number(n) => n.is_i64() || n.is_u64() || key.ends_with("_approx"),
        Value::Array(a) => a.iter().all(|x| decimals_only_in_approx(x, key)),
        Value::Object(o) => o.iter().all(|(k, x)| decimals_only_in_approx(x, k)),
        _ => true,
    }
}

#[test]
fn verify_exits_zero() {
    let (code, out, _) = run(bin().arg("verify-paper"));
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("so10-F0"));
    assert!(out.contains("0 failed"));
    let (code, out, _) = run(bin().args(["verify-paper", "--json"]));
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v.as_array().unwrap().len() >= 9);
}

#[test]
fn check_passing_model() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "so10.json", SO10);
    let (code, out, err) = run(bin().arg("check").arg(&f));
    assert_eq!(code, 0, "{err}");
    let rec: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(rec["overall"]["pass"], true);
    assert_eq!(rec["anomaly"]["W_zero"], true);
    assert_eq!(rec["anomaly"]["af"], "0");
    assert!(rec["window"]["z_interval_approx"].is_array());
    assert!(decimals_only_in_approx(&rec, ""));
}

#[test]
fn check_invalid_spectral_data() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.json", SPECTRAL_BAD_LAMBDA);
    let (code, out, err) = run(bin().arg("check").arg(&f));
    assert_eq!(code, 1);
    let rec: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(rec["overall"]["failed_stage"], "validity");
    assert_eq!(rec["errors"][0]["stage"], "validity");
    assert!(rec["errors"][0]["message"].as_str().unwrap().contains("spectral data invalid"));
    assert!(err.contains("validity"));
}

#[test]
fn check_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let truncated = write(dir.path(), "t.json", &SO10[..40]);
    let (code, _, err) = run(bin().arg("check").arg(&truncated));
    assert_eq!(code, 2);
    assert!(err.contains("malformed JSON"), "{err}");

    let bad = write(dir.path(), "b.json", &SO10.replace(r#""h":1"#, r#""h":"one""#));
    let (code, _, err) = run(bin().arg("check").arg(&bad));
    assert_eq!(code, 2);
    assert!(err.contains("polarization.h"), "{err}");

    let unknown = write(dir.path(), "u.json", &SO10.replace(r#""require""#, r#""requires""#));
    let (code, _, err) = run(bin().arg("check").arg(&unknown));
    assert_eq!(code, 2);
    assert!(err.contains("requires"), "{err}");

    let (code, _, _) = run(bin().arg("check").arg(dir.path().join("missing.json")));
    assert_eq!(code, 2);
}

#[test]
fn bound_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "so10.json", SO10);
    let (code, _, err) = run(bin().arg("check").arg(&f).env("CYBUNDLE_BOUND", "0"));
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("bound"));
    let (code, _, _) = run(bin().arg("check").arg(&f).env("CYBUNDLE_BOUND", "12"));
    assert_eq!(code, 0);
    let (code, _, _) = run(bin().arg("check").arg(&f).env("CYBUNDLE_BOUND", "many"));
    assert_eq!(code, 2);
    // an explicit bound in the file wins
    let explicit = write(dir.path(), "e.json", &SO10.replace(r#""require""#, r#""bound":7,"require""#));
    let (code, _, _) = run(bin().arg("check").arg(&explicit).env("CYBUNDLE_BOUND", "0"));
    assert_eq!(code, 0);
}

#[test]
fn search_singleton_e6() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "e6.json", r#"{"base":"F0","mode":"pullback","n_range":2,"x_range":2,"alpha_box":[0,0]}"#);
    let (code, out, err) = run(bin().arg("search").arg(&f));
    assert_eq!(code, 0, "{err}");
    let records: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(records.len(), 1);
    let rec: Value = serde_json::from_str(records[0]).unwrap();
    assert_eq!(rec["anomaly"]["W_zero"], true);
    assert_eq!(rec["bundle"]["c2E"], 92);
    assert!(out.lines().last().unwrap().starts_with("# "));
    let summary: Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(summary["scanned"], 1);
}

#[test]
fn search_limit_and_out() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "big.json",
        r#"{"base":"dP2","mode":"pullback","n_range":[2,4],"x_range":[-2,2],"alpha_box":[[-3,3],[-3,3],[-3,3]]}"#,
    );
    let out = dir.path().join("out.jsonl");
    let (code, stdout, _) = run(bin().arg("search").arg(&f).args(["--limit", "5", "--jobs", "4", "--out"]).arg(&out));
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 5);
    let summary: Value = serde_json::from_str(text.lines().last().unwrap().trim_start_matches("# ")).unwrap();
    assert_eq!(summary["scanned"], 3 * 5 * 343);
    for line in text.lines().filter(|l| !l.starts_with('#')) {
        assert!(decimals_only_in_approx(&serde_json::from_str(line).unwrap(), ""));
    }
}

#[test]
fn search_no_hits_still_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "none.json",
        r#"{"base":"enriques","mode":"pullback","n_range":2,"x_range":1,"alpha_box":[[1,2],[1,2]],"H_box":[2,3],"require":"W_effective"}"#,
    );
    let (code, out, _) = run(bin().arg("search").arg(&f));
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 1);
}

#[test]
fn search_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in [
        ("unknown.json", r#"{"base":"F0","mode":"pullback","n_range":2,"colour":1}"#),
        ("surface.json", r#"{"base":"K3","mode":"pullback","n_range":2}"#),
        ("rank.json", r#"{"base":"F0","mode":"pullback","n_range":2,"alpha_box":[1,2,3]}"#),
        ("polarization.json", r#"{"base":"enriques","mode":"pullback","n_range":2}"#),
        ("spectral.json", r#"{"base":"F0","mode":"spectral","n_range":2}"#),
        ("truncated.json", r#"{"base":"F0","mode""#),
    ] {
        let f = write(dir.path(), name, text);
        let (code, out, err) = run(bin().arg("search").arg(&f));
        assert_eq!(code, 2, "{name}: {err}");
        assert!(out.is_empty(), "{name}");
    }
}
