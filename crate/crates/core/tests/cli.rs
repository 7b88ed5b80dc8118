use std::process::{Command, Output};

use serde_json::Value;

fn locc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_locc"))
        .args(args)
        .output()
        .expect("locc runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

#[test]
fn triples_all_json() {
    let out = locc(&["ghz", "triples", "--all", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 56);
    let refused = rows.iter().filter(|r| r["clonable"] == false).count();
    assert_eq!(refused, 24);
    assert!(rows
        .iter()
        .filter(|r| r["clonable"] == false)
        .all(|r| r["witness_cut"].is_string() && r["circuit"].is_null()));
}

#[test]
fn audit_pair_matches_published_values() {
    let out = locc(&["w", "audit", "--pair", "1,6", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let row = &v[0];
    assert_eq!(row["category"], "B");
    assert_eq!(row["form"], "I");
    assert!((row["negativity_in"].as_f64().unwrap() - 1.89097).abs() < 1e-3);
    assert!((row["negativity_out"].as_f64().unwrap() - 2.14597).abs() < 1e-3);
}

#[test]
fn audit_rejects_repeated_pair() {
    let out = locc(&["w", "audit", "--pair", "1,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let out = locc(&["teleport"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn mismatch_beyond_match_tol_exits_one() {
    // the published values carry five decimals, so a tolerance far below
    // their rounding error must flag them
    let out = locc(&["w", "audit", "--pair", "1,6", "--match-tol", "1e-9"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("check failed"));
}

#[test]
fn classify_all_csv() {
    let out = locc(&["w", "classify", "--all", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 28);
    assert!(rows.iter().all(|r| &r[0] == "w_class"));
    let count = |cat: &str| rows.iter().filter(|r| &r[3] == cat).count();
    assert_eq!((count("A"), count("B"), count("C")), (6, 10, 12));
}

#[test]
fn lemma_and_blank_check() {
    let out = locc(&["w", "lemma", "--step", "0.05", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["violations"], Value::Array(vec![]));

    let out = locc(&[
        "w",
        "blank-check",
        "--params",
        "0.5,0.25,0.2",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let cert = &json(&out)[0];
    assert!(cert["blank_entropy_bits"].as_f64().unwrap() < cert["required_bits"].as_f64().unwrap());

    let out = locc(&["w", "blank-check", "--params", "1/3,1/3,1/3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn measure_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bell.json");
    let h = std::f64::consts::FRAC_1_SQRT_2;
    std::fs::write(&path, format!("[[{h},0],[0,0],[0,0],[{h},0]]")).unwrap();
    let arg = format!("@{}", path.display());
    let out = locc(&[
        "measure", "entropy", "--state", &arg, "--cut", "2", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v[0]["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v[0]["cut"], "1|2");

    let out = locc(&["measure", "negativity", "--state", "0,1,1", "--cut", "1,2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("1.00000"));

    let out = locc(&[
        "measure",
        "entropy",
        "--state",
        "@/nonexistent.json",
        "--cut",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ghz_clone_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("clone.json");
    let out = locc(&[
        "ghz",
        "clone",
        "--states",
        "0,0,0",
        "1,1,1",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v[0]["verified"], true);
    assert!(v[0]["circuit"]["gates"][0]
        .as_str()
        .unwrap()
        .starts_with("CNOT"));
}

#[test]
fn full_report_is_deterministic() {
    let a = locc(&["report", "--format", "json", "--seed", "5"]);
    let b = locc(&["report", "--format", "json", "--seed", "5"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["pairs"].as_array().unwrap().len(), 28);
    assert_eq!(v["ghz_triples"].as_array().unwrap().len(), 56);
    assert_eq!(v["config"]["seed"], 5);

    let c = locc(&["report", "--format", "csv"]);
    let d = locc(&["report", "--format", "csv"]);
    assert_eq!(c.stdout, d.stdout);
    let text = String::from_utf8(c.stdout).unwrap();
    assert_eq!(
        text.lines().filter(|l| l.starts_with("w_pair,")).count(),
        28
    );
}
