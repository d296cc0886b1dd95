use std::process::{Command, Output};

fn mcf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> serde_json::Value {
    let out = mcf(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

#[test]
fn certify_reference_pairs() {
    for alg in ["triangle", "cassaigne"] {
        let v = json(&["certify", "--paper-paths", alg, "--format", "json"]);
        assert_eq!(v["schema"], 1);
        assert_eq!(v["command"], "certify");
        assert_eq!(v["report"]["verdict"], true);
        assert_eq!(v["report"]["gcd_of_discriminants"], "1");
    }
}

#[test]
fn negative_verdict_exits_one() {
    let out = mcf(&["certify", "--paths", "C:2", "C:1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["certify"][..],
        &["certify", "--paths", "C:3", "C:1"],
        &["lyapunov", "--algorithm", "brun"],
        &["nu", "--algorithm", "selmer", "--samples", "0"],
        &["orbit", "--algorithm", "triangle", "--point", "1,2"],
        &["search", "--algorithm", "selmer", "--max-len", "40"],
        &["frobnicate"],
    ] {
        let out = mcf(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn help_exits_zero() {
    let out = mcf(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("certify"));
}

#[test]
fn cylinders_csv_and_file_output() {
    let out = mcf(&["cylinders", "--max-b", "3", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("b,measure,norm,partial_sum"));
    assert_eq!(lines.count(), 4);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cyl.json");
    let out = mcf(&["cylinders", "--max-b", "3", "--format", "json", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["report"]["rows"][0]["measure"], "1/48");
}

#[test]
fn wide_orbit_matches_exact_labels() {
    let point = "12345678901/98765432101,23456789012/98765432101,62963964188/98765432101";
    let exact = json(&["orbit", "--algorithm", "triangle", "--point", point, "--steps", "8", "--format", "json"]);
    let wide = json(&["orbit", "--algorithm", "triangle", "--point", point, "--steps", "8", "--wide", "--format", "json"]);
    assert_eq!(wide["report"]["flavor"], "wide");
    assert_eq!(exact["report"]["labels"], wide["report"]["labels"]);
}

#[test]
fn search_lists_reference_pair() {
    let out = mcf(&["search", "--algorithm", "cassaigne", "--max-len", "7"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("C:21221  C:1222121"));
}
