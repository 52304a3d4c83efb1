use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_outspine")).args(args).env_remove("OUTSPINE_OUTPUT_DIR").output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{:?}: {}", args, String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("outspine-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    fs::write(&p, contents).unwrap();
    p
}

const ROSE3: &str =
    "graph { v: v0; e: e1 v0 v0; e2 v0 v0; e3 v0 v0; }\nmarking { a1 = e1; a2 = e2; a3 = e3; }\nbasepoint: v0\n";

#[test]
fn words() {
    assert_eq!(stdout(&["reduce", "a1 a2 a2^-1 a1"]).trim(), "a1 a1");
    assert_eq!(stdout(&["reduce", "--cyclic", "a2 a1 a3 a2^-1"]).trim(), "a1 a3\nconjugator: a2");
    assert_eq!(stdout(&["apply", "--map", "a1 a2; a2", "a1 a2^-1"]).trim(), "a1");
}

#[test]
fn act_round_trips_through_the_inverse() {
    let g = scratch("rose3.g", ROSE3);
    let moved = stdout(&["act", g.to_str().unwrap(), "--map", "a1 a2; a2; a3"]);
    let h = scratch("moved.g", &moved);
    let back = stdout(&["act", h.to_str().unwrap(), "--map", "a1 a2^-1; a2; a3"]);
    let b = scratch("back.g", &back);
    assert!(stdout(&["equiv", g.to_str().unwrap(), b.to_str().unwrap()]).starts_with("equivalent"));
    assert!(stdout(&["equiv", g.to_str().unwrap(), h.to_str().unwrap()]).starts_with("not equivalent"));
}

#[test]
fn counts_on_the_rose() {
    let g = scratch("count.g", ROSE3);
    let i = stdout(&["count-i", g.to_str().unwrap(), "--a", "a1", "--b", "a1, a2", "a3 a1 a2 a1"]);
    assert_eq!(i.trim(), "1");
    let out = run(&["count-i", g.to_str().unwrap(), "--a", "a1", "--b", "a1, a2", "a2 a1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error[conjugate-into-b]"));
}

#[test]
fn witness_table_is_deterministic() {
    let args = ["witness", "--case", "1", "--n", "3", "--r", "1", "--kmax", "6"];
    let a = stdout(&args);
    assert_eq!(a, stdout(&args));
    let mut rows = csv::Reader::from_reader(a.as_bytes());
    assert_eq!(rows.headers().unwrap(), vec!["k", "upper_nielsen", "i_k", "spine_lb"]);
    let i_k: Vec<u64> = rows.records().map(|r| r.unwrap()[2].parse().unwrap()).collect();
    assert_eq!(i_k, vec![0, 1, 1, 2, 3, 5, 8]);
}

#[test]
fn embed_then_retract_is_the_identity() {
    let g = scratch("pointed.g", "graph { v: v0 v1; e: e1 v0 v1; e2 v0 v1; e3 v1 v1; }\nmarking { a1 = e1 e2^-1; a2 = e1 e3 e1^-1; }\nbasepoint: v0\n");
    let j = scratch("j.g", &stdout(&["embed-j", g.to_str().unwrap()]));
    let r = scratch("r.g", &stdout(&["retract-aut", j.to_str().unwrap()]));
    assert_eq!(fs::read_to_string(&r).unwrap(), fs::read_to_string(&g).unwrap());
}

#[test]
fn out_dir_receives_a_copy() {
    let dir = std::env::temp_dir().join(format!("outspine-out-{}", std::process::id()));
    let out = stdout(&["--out-dir", dir.to_str().unwrap(), "reduce", "a1 a1^-1 a2"]);
    let written: Vec<_> = fs::read_dir(&dir).unwrap().map(|e| fs::read_to_string(e.unwrap().path()).unwrap()).collect();
    assert_eq!(written, vec![out]);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["reduce", "a1 x"]).status.code(), Some(2));
    assert_eq!(run(&["coindex", "--n", "3", "--system", "a1 | a1"]).status.code(), Some(2));
    assert_eq!(run(&["selftest", "--help"]).status.code(), Some(0));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}
