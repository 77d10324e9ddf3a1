use std::process::{Command, Output};

use serde_json::Value;

fn endolab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_endolab")).args(args).env("ENDOLAB_WORKERS", "1").output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn quadspace_diagonal() {
    let out = endolab(&["quadspace", "--diag", "1,1,1,1,1,-1,-1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["d"], 7);
    assert_eq!(v["result"]["signature"], serde_json::json!([5, 2]));
    assert_eq!(v["status"], "pass");
    assert_eq!(v["schema"], "endolab.report/1");
}

#[test]
fn quadspace_hyperbolic_gram_has_trivial_discriminant() {
    let out = endolab(&["quadspace", "--gram", r#"[[0, 1], ["1/1", 0]]"#]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["delta"], "1");
}

#[test]
fn quadspace_rejects_bad_input() {
    for args in [
        &["quadspace", "--diag", "1,x"][..],
        &["quadspace", "--diag", "1,0"],
        &["quadspace", "--gram", "[[1, 2]]"],
        &["quadspace", "--gram", "not json"],
        &["quadspace"],
    ] {
        assert_eq!(endolab(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn endoscopy_rows() {
    let out = endolab(&["endoscopy", "--d", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let rows = v["result"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r["iota"].is_string() && r.get("subset").is_none()));

    let v = json(&endolab(&["endoscopy", "--d", "9", "--levi", "M12"]));
    assert!(v["result"]["rows"].as_array().unwrap().iter().all(|r| r["subset"].is_string()));

    let out = endolab(&["endoscopy", "--d", "8", "--levi", "M12", "--format", "tsv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("case\tdplus\tdeltaplus\tdminus\tdeltaminus\tout\tiota\tA"));
}

#[test]
fn endoscopy_rejects_bad_input() {
    for args in [
        &["endoscopy", "--d", "8", "--delta", "zero"][..],
        &["endoscopy", "--d", "8", "--delta", "0"],
        &["endoscopy", "--d", "8", "--context", "global:3", "--delta", "5"],
        &["endoscopy", "--d", "8", "--context", "qp:4"],
        &["endoscopy", "--d", "5"],
        &["endoscopy", "--d", "8", "--levi", "M3"],
    ] {
        assert_eq!(endolab(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn signs_table_is_tsv() {
    let out = endolab(&["signs", "table", "--m-max", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("levi\tparity\tm\t"));
    assert!(lines.all(|l| l.ends_with("true")));
}

#[test]
fn verify_examples_pass() {
    for args in [
        &["verify", "vanishing", "--r", "5", "--case", "odd"][..],
        &["verify", "satake", "--d", "8", "--a", "2"],
        &["verify", "arch", "--case", "M2", "--d", "9", "--samples", "10"],
        &["verify", "signs", "--m-max", "5"],
        &["verify", "kostant", "--m-max", "3", "--bound", "1"],
        &["verify", "waldspurger", "--samples", "50"],
        &["verify", "hilbert", "--pairs", "50"],
        &["verify", "invariants", "--d", "7,9"],
    ] {
        let out = endolab(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stdout));
        let v = json(&out);
        assert_eq!(v["status"], "pass");
        assert_eq!(v["witnesses"], serde_json::json!([]));
    }
}

#[test]
fn out_of_range_sample_fails_with_witnesses() {
    let out = endolab(&["verify", "arch", "--case", "M12", "--d", "8", "--range", "out-of-range", "--samples", "5"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["status"], "fail");
    assert!(!v["witnesses"].as_array().unwrap().is_empty());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(endolab(&["verify", "nope"]).status.code(), Some(2));
    assert_eq!(endolab(&["verify", "arch", "--case", "M2", "--d", "8"]).status.code(), Some(2));
    assert_eq!(endolab(&["frobnicate"]).status.code(), Some(2));
    let bad_workers = Command::new(env!("CARGO_BIN_EXE_endolab"))
        .args(["verify", "signs"])
        .env("ENDOLAB_WORKERS", "many")
        .output()
        .unwrap();
    assert_eq!(bad_workers.status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical() {
    let args = ["verify", "arch", "--case", "M12", "--d", "7", "--samples", "8", "--seed", "3"];
    let a = endolab(&args);
    let b = endolab(&args);
    let c = Command::new(env!("CARGO_BIN_EXE_endolab")).args(args).env("ENDOLAB_WORKERS", "3").output().unwrap();
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    assert_eq!(json(&a)["parameters"]["seed"], 3);
}
