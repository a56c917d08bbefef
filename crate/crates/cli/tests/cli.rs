use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gl2designs")).args(args).env_remove("GL2DESIGNS_CAP").output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn field_reports() {
    let v = json(&["field", "--field", "3^3"]);
    assert_eq!(v["q"], 27);
    assert_eq!(v["modulus"], serde_json::json!([1, 0, 2, 1]));
    let v = json(&["field", "--field", "2^4:1,1,0,0,1"]);
    assert_eq!(v["spec"], "2^4:1,1,0,0,1");
}

#[test]
fn structured_errors() {
    let out = run(&["field", "--field", "4^2"]);
    assert!(!out.status.success());
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "NotPrime");

    let out = run(&["design", "lambda", "--field", "3^3", "--k", "7", "--subspace", "bogus"]);
    assert!(!out.status.success());
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "Usage");

    let out = run(&["design", "build", "--field", "3^3", "--k", "7", "--method", "brute", "--cap", "1000"]);
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "CapExceeded");
}

#[test]
fn design_commands() {
    assert_eq!(json(&["design", "lambda", "--field", "3^3", "--k", "7", "--subspace", "lucas"])["lambda"], 15);
    let s = json(&["design", "steiner", "--field", "3^2", "--m", "1"]);
    assert_eq!((s["b"].as_u64(), s["steiner"].as_bool()), (Some(30), Some(true)));
    let e = json(&["design", "empty", "--field", "2^3", "--k", "5"]);
    assert_eq!(e["status"], "exhausted_empty");
    let e = json(&["design", "empty", "--field", "3^3", "--k", "6"]);
    assert_eq!(e["status"], "empty_p_divides");
}

#[test]
fn build_and_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w5.json");
    let p = path.to_str().unwrap();
    let out = run(&["design", "build", "--field", "2^4", "--k", "5", "--output", p]);
    assert!(out.status.success());
    let fam: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(fam["blocks"].as_array().unwrap().len(), 68);
    let r = json(&["design", "verify", "--blocks", p, "--t", "3"]);
    assert_eq!((r["is_design"].as_bool(), r["lambda"].as_u64()), (Some(true), Some(1)));

    // drop one block: no longer a design
    let mut broken = fam.clone();
    broken["blocks"].as_array_mut().unwrap().pop();
    std::fs::write(&path, broken.to_string()).unwrap();
    let r = json(&["design", "verify", "--blocks", p, "--t", "3"]);
    assert_eq!(r["is_design"], false);

    std::fs::write(&path, "{not json").unwrap();
    assert!(!run(&["design", "verify", "--blocks", p]).status.success());
}

#[test]
fn subspace_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.json");
    // the Lucas subspace of degree 4 over F_9: X^4, X^3Y, XY^3, Y^4
    std::fs::write(&path, "[[1,0,0,0,0],[0,1,0,0,0],[0,0,0,1,0],[0,0,0,0,1]]").unwrap();
    let sel = format!("file:{}", path.display());
    let v = json(&["design", "lambda", "--field", "3^2", "--subspace", &sel]);
    assert_eq!((v["k"].as_u64(), v["lambda"].as_u64()), (Some(4), Some(1)));
}

#[test]
fn cayley_commands() {
    let c = json(&["cayley", "classify", "--p", "3", "--kmax", "20"]);
    let flagged: Vec<u64> =
        c["rows"].as_array().unwrap().iter().filter(|r| r["single_equation"] == true).map(|r| r["k"].as_u64().unwrap()).collect();
    assert_eq!(flagged, vec![3, 4, 7]);
    let c = json(&["cayley", "check", "--field", "2^4", "--k", "5"]);
    assert_eq!((c["equal"].as_bool(), c["p1_blocks"].as_u64()), (Some(true), Some(68)));
    let s = json(&["cayley", "sixsets", "--field", "3^3"]);
    assert_eq!((s["six_sets"].as_u64(), s["w7_blocks"].as_u64()), (Some(9828), Some(1404)));
}

#[test]
fn code_commands() {
    let m = json(&["code", "melas", "--m", "3"]);
    assert_eq!((m["A3"].as_u64(), m["A5"].as_u64()), (Some(0), Some(2496)));
    assert_eq!((m["lambda2"].as_u64(), m["lambda1"].as_u64()), (Some(15), Some(60)));
    let i = json(&["code", "info", "--field", "2^4", "--k", "5", "--subspace", "lucas"]);
    assert_eq!(i["params"], "[17, 4, 12]");
    let d = json(&["code", "dualdesign", "--field", "3^2", "--k", "4", "--w", "min"]);
    assert_eq!(d["report"]["is_design"], true);
}

#[test]
fn deterministic_across_workers() {
    let a = run(&["design", "build", "--field", "3^3", "--k", "7", "--workers", "1"]);
    let b = run(&["design", "build", "--field", "3^3", "--k", "7", "--workers", "4"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn projections() {
    let csv = run(&["design", "build", "--field", "3^2", "--k", "4", "--format", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert_eq!(text.lines().count(), 30);
    assert!(text.lines().all(|l| l.split(',').count() == 4));
    let txt = run(&["code", "melas", "--m", "2", "--format", "text"]);
    assert!(String::from_utf8(txt.stdout).unwrap().contains("A5: 0"));
}
