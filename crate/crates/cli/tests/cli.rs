use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_symline"))
}

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn scratch_dir(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("symline-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    d
}

#[test]
fn solve_json_report() {
    let out = bin()
        .args(["solve", "--json", "--seed", "3"])
        .arg(corpus("kamke128.ode"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["seed"], 3);
    assert_eq!(r["probes"], 8);
    let b = &r["branches"][0];
    assert_eq!(b["outcome"], "CaseGeneral");
    assert_eq!(b["verified"]["determining"], true);
    assert_eq!(b["expect"]["ok"], true);
    assert!(b["symmetry"]["xi"].is_string());
    assert!(r["integrate_call_sites"].as_array().unwrap().iter().all(|s| s.is_string()));
}

#[test]
fn solve_human_output_lists_both_branches() {
    let out = bin().arg("solve").arg(corpus("kamke394.ode")).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("branch 1:") && text.contains("branch 2:"), "{text}");
    assert_eq!(text.matches("expect: ok").count(), 2);
}

#[test]
fn expectation_mismatch_exits_one() {
    let dir = scratch_dir("mismatch");
    std::fs::create_dir_all(&dir).unwrap();
    let f = dir.join("wrong.ode");
    std::fs::write(&f, "ode: y' = y^3 + y\nexpect.class: CaseGeneral\n").unwrap();
    let out = bin().arg("solve").arg(&f).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("MISMATCH"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn unreadable_input_exits_two() {
    let out = bin().args(["solve", "/nonexistent/none.ode"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["gen", "--family", "nope", "--out", "/tmp/x"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let dir = scratch_dir("bad");
    std::fs::create_dir_all(&dir).unwrap();
    for (name, text) in [("reserved.ode", "param u\node: y' = u*y^3\n"), ("unknown.ode", "ode: y' = q*y^3\n")] {
        let f = dir.join(name);
        std::fs::write(&f, text).unwrap();
        let out = bin().arg("solve").arg(&f).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{name}");
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn generated_files_pass_their_own_expectations() {
    let dir = scratch_dir("gen");
    for family in ["gts", "riccati-q0"] {
        let st = bin()
            .args(["gen", "--family", family, "--count", "3", "--seed", "40", "--out"])
            .arg(&dir)
            .status()
            .unwrap();
        assert!(st.success());
    }
    let out = bin().args(["corpus", "--json", "--jobs", "1"]).arg(&dir).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let c: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(c["files"], 6);
    assert!(c["expect_failures"].as_array().unwrap().is_empty());
    std::fs::remove_dir_all(&dir).unwrap();
}
