use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_superproj")).args(args).env_remove("SUPERPROJ_FORMAT").output().unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut a = vec!["--format", "json"];
    a.extend_from_slice(args);
    let out = run(&a);
    (out.status.code().unwrap(), serde_json::from_slice(&out.stdout).unwrap())
}

#[test]
fn cohomology_with_oracle() {
    let (code, v) = json(&["cohomology", "--n", "1", "--m", "3", "--ell", "-1", "--oracle"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "cohomology");
    let text = String::from_utf8(run(&["cohomology", "--n", "1", "--m", "3", "--ell", "-1"]).stdout).unwrap();
    assert!(text.lines().any(|l| l.split_whitespace().collect::<Vec<_>>() == ["1", "6", "6", "12"]), "{text}");
}

#[test]
fn cech_example() {
    let out = run(&["cech", "--m", "3", "--transition", "1+(p1*p2+p1*p3+p2*p3)*w^-1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("h0 0|0  h1 2|2"), "{text}");
}

#[test]
fn tangent_basis() {
    let out = run(&["tangent", "--n", "1", "--m", "2", "--basis"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("16 global fields (8|8)"));
}

#[test]
fn json_is_deterministic() {
    let args = ["--format", "json", "picard", "--n", "1", "--m", "4", "--verify"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["even"]["continuous_dim"], 9);
}

#[test]
fn format_from_env() {
    let out = Command::new(env!("CARGO_BIN_EXE_superproj")).args(["characteristic", "--n", "2", "--m", "3"]).env("SUPERPROJ_FORMAT", "csv").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("i,j,dim\n0,0,1\n"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["cech", "--m", "3", "--transition", "1+t1^2"][..],
        &["cech", "--m", "3", "--transition", "1+z*p1"],
        &["cech", "--m", "3", "--transition", "w^-2 + 4*w^2*p1*p2", "--window", "5"],
        &["--format", "yaml", "characteristic", "--n", "1", "--m", "1"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let out = run(&["cech", "--m", "3", "--transition", "1+z*p1"]);
    assert!(String::from_utf8(out.stderr).unwrap().contains("byte 4"));
}

#[test]
fn osp22_reports_disagreement() {
    let (code, v) = json(&["osp22-verify"]);
    assert_eq!(code, 1);
    assert_eq!(v["status"], "verification-failure");
    assert_eq!(v["integrability"]["equivalent"], false);
}

#[test]
fn selftest_claims() {
    let (code, v) = json(&["selftest", "--suite", "claims"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], 1);
}
