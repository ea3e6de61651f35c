use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn descfact(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_descfact"))
        .args(args)
        .env_remove("DESCFACT_SEED")
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn factorize_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let factors = dir.path().join("f.json");
    let ex1 = data("ex1.json");
    let out = descfact(&[
        "grcf",
        path(&ex1),
        "--alpha",
        "-1",
        "--poles",
        "-1,-2,-3",
        "--mindeg-den",
        "-o",
        path(&factors),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("minimal denominator order 3"), "{stderr}");

    let out = descfact(&["verify", path(&ex1), path(&factors)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], Value::Bool(true));
    assert_eq!(report["den_order"], 3);
}

#[test]
fn every_factorization_command_verifies() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, sys) in [
        ("grcf", "ex1.json"),
        ("glcf", "ex1.json"),
        ("grcfid", "ex2.json"),
        ("glcfid", "ex2.json"),
        ("grcf", "ex2.json"),
    ] {
        let factors = dir.path().join(format!("{cmd}-{sys}"));
        let sys = data(sys);
        let out = descfact(&[cmd, path(&sys), "-o", path(&factors)]);
        assert_eq!(
            code(&out),
            0,
            "{cmd}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let out = descfact(&["verify", path(&sys), path(&factors)]);
        assert_eq!(
            code(&out),
            0,
            "{cmd}: {}",
            String::from_utf8_lossy(&out.stdout)
        );
    }
}

#[test]
fn corrupted_factors_fail_verification() {
    let dir = tempfile::tempdir().unwrap();
    let factors = dir.path().join("f.json");
    let ex1 = data("ex1.json");
    assert_eq!(
        code(&descfact(&[
            "grcf",
            path(&ex1),
            "--alpha=-1",
            "-o",
            path(&factors)
        ])),
        0
    );
    let mut file: Value =
        serde_json::from_str(&std::fs::read_to_string(&factors).unwrap()).unwrap();
    let dm = &mut file["realization"]["DM"][0][0];
    *dm = Value::from(dm.as_f64().unwrap() + 0.1);
    std::fs::write(&factors, serde_json::to_string(&file).unwrap()).unwrap();
    let out = descfact(&["verify", path(&ex1), path(&factors)]);
    assert_eq!(code(&out), 4);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], Value::Bool(false));
}

#[test]
fn continuous_improper_inner_has_no_solution() {
    let out = descfact(&["grcfid", path(&data("ex_cont_improper.json"))]);
    assert_eq!(code(&out), 3);
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_errors() {
    assert_eq!(code(&descfact(&[])), 1);
    assert_eq!(code(&descfact(&["grcf"])), 1);
    assert_eq!(code(&descfact(&["grcf", "/nonexistent/system.json"])), 1);
    let ex1 = data("ex1.json");
    assert_eq!(
        code(&descfact(&["grcf", path(&ex1), "--alpha", "not-a-number"])),
        1
    );
    // A positive stability degree is not a valid continuous-time region.
    assert_eq!(code(&descfact(&["grcf", path(&ex1), "--alpha", "1"])), 1);
    assert_eq!(
        code(&descfact(&[
            "poles",
            path(&ex1),
            "--alpha",
            "-1",
            "--inner"
        ])),
        1
    );
    assert_eq!(code(&descfact(&["--help"])), 0);
}

#[test]
fn verify_rejects_factors_of_another_system() {
    let dir = tempfile::tempdir().unwrap();
    let factors = dir.path().join("f.json");
    let ex1 = data("ex1.json");
    let improper = data("ex_cont_improper.json");
    assert_eq!(
        code(&descfact(&["grcf", path(&ex1), "-o", path(&factors)])),
        0
    );
    assert_eq!(
        code(&descfact(&["verify", path(&improper), path(&factors)])),
        1
    );
}

#[test]
fn outputs_are_byte_identical() {
    let ex2 = data("ex2.json");
    let a = descfact(&["grcfid", path(&ex2)]);
    let b = descfact(&["grcfid", path(&ex2)]);
    assert_eq!(code(&a), 0);
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn seed_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let factors = dir.path().join("f.json");
    let ex1 = data("ex1.json");
    assert_eq!(
        code(&descfact(&["grcf", path(&ex1), "-o", path(&factors)])),
        0
    );
    let from_flag = descfact(&["verify", path(&ex1), path(&factors), "--seed", "7"]);
    let from_env = Command::new(env!("CARGO_BIN_EXE_descfact"))
        .args(["verify", path(&ex1), path(&factors)])
        .env("DESCFACT_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(code(&from_env), 0);
    assert_eq!(from_flag.stdout, from_env.stdout);
    let other = descfact(&["verify", path(&ex1), path(&factors), "--seed", "8"]);
    assert_eq!(code(&other), 0);
    assert_ne!(from_flag.stdout, other.stdout);
}

#[test]
fn pole_listing() {
    let out = descfact(&["poles", path(&data("ex1.json")), "--alpha", "-1"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["summary"], "{-1+0i, 0+0i, ∞×2}");
    assert_eq!(v["n_bad"], 3);
    assert_eq!(v["infinite_higher"], 2);

    let out = descfact(&["poles", path(&data("ex2.json")), "--inner"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["summary"], "{0+0i, 2+0i, ∞×2}");
    assert_eq!(v["n_bad"], 3);
}
