use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_blowuplab"));
    c.env_remove("BLOWUPLAB_BUDGET");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn prime_and_decompose() {
    let d = TempDir::new().unwrap();
    let c5 = write(d.path(), "C5.g6", "Dhc\n");
    let o = run(&["prime", "--in", s(&c5)]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), r#"{"prime":true}"#);
    let p4 = write(d.path(), "P4.g6", "Ch\n");
    let o = run(&["decompose", "--in", s(&p4)]);
    assert!(stdout(&o).contains("\"PRIME\""));
    let k4 = write(d.path(), "K4.g6", "C~\n");
    let o = run(&["decompose", "--in", s(&k4)]);
    assert!(stdout(&o).contains("\"SERIES\""));
    assert_eq!(stdout(&run(&["prime", "--in", s(&k4)])), r#"{"prime":false}"#);
}

#[test]
fn structure_json_input() {
    let d = TempDir::new().unwrap();
    let m = write(
        d.path(),
        "p3.json",
        r#"{"language":[{"name":"E","arity":2}],"size":3,"relations":{"E":[[1,2],[2,1],[2,3],[3,2]]}}"#,
    );
    let k2 = write(d.path(), "K2.g6", "A_");
    let o = run(&["density", "--motif", s(&k2), "--in", s(&m)]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["embeddings"], 4);
    assert_eq!(v["p"], "2/3");
    let bad = write(d.path(), "bad.json", r#"{"language":[{"name":"E","arity":2}],"size":2,"relations":{"E":[[1,1]]}}"#);
    let o = run(&["prime", "--in", s(&bad)]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn blowup_commands() {
    let d = TempDir::new().unwrap();
    let spec = write(d.path(), "c4.json", r#"{"tail":{"kind":"constant","base":["Cl"]}}"#);
    let k2 = write(d.path(), "K2.g6", "A_\n");
    let p4 = write(d.path(), "P4.g6", "Ch\n");
    let o = run(&["blowup", "density", "--motif", s(&k2), "--spec", s(&spec), "--exact"]);
    assert_eq!(stdout(&o), "\"2/3\"");
    let o = run(&["blowup", "density", "--motif", s(&p4), "--spec", s(&spec), "--exact"]);
    assert_eq!(stdout(&o), "\"0\"");
    let o = run(&["blowup", "density", "--motif", s(&k2), "--spec", s(&spec), "--eps", "1e-9"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["depth"].as_u64().unwrap() <= 40);
    let a = run(&["blowup", "sample", "--spec", s(&spec), "--n", "30", "--seed", "42", "--format", "g6"]);
    let b = run(&["blowup", "sample", "--spec", s(&spec), "--n", "30", "--seed", "42", "--format", "g6"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let o = run(&["blowup", "profile", "--spec", s(&spec), "--kmax", "4", "--depth", "12", "--format", "g6"]);
    assert_eq!(stdout(&o).lines().count(), 18);
    let o = run(&["blowup", "probe", "--spec", s(&spec), "--kmax", "3", "--trials", "10"]);
    assert!(stdout(&o).contains("\"persistent\""));
    let mask = write(d.path(), "mask.json", "[1, 3]");
    let o = run(&["blowup", "density", "--motif", s(&k2), "--spec", s(&spec), "--mask", s(&mask), "--exact"]);
    assert_eq!(stdout(&o), "\"1/3\"");
    let rep = write(d.path(), "rep.json", r#"{"tail":{"kind":"repeating","base":["Cl"]}}"#);
    let o = run(&["blowup", "density", "--motif", s(&k2), "--spec", s(&rep), "--exact"]);
    assert_eq!(o.status.code(), Some(2));
    let graphon = write(d.path(), "w.json", r#"{"measures":["1/2","1/2"],"weights":[["0","1"],["1","0"]]}"#);
    let o = run(&["blowup", "sample", "--graphon", s(&graphon), "--n", "6", "--seed", "1"]);
    assert!(o.status.success());
}

#[test]
fn closure_commands() {
    let d = TempDir::new().unwrap();
    let primes = write(d.path(), "primes.g6", "?\n@\nA_\nA?\n");
    let o = run(&["closure", "enum", "--primes", s(&primes), "--nmax", "4", "--format", "g6"]);
    assert_eq!(stdout(&o).lines().count(), 18);
    let p4 = write(d.path(), "P4.g6", "Ch\n");
    let o = run(&["closure", "member", "--in", s(&p4), "--primes", s(&primes)]);
    assert_eq!(stdout(&o), r#"{"member":false}"#);
    let o = run(&["closure", "obstructions", "--class", "cograph", "--nmax", "5"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["all_prime"], true);
    let obs = v["obstructions"].as_array().unwrap();
    assert_eq!(obs.len(), 1);
    let g = blowuplab::graph6::decode(obs[0].as_str().unwrap()).unwrap();
    let mut degrees: Vec<usize> = (0..4).map(|u| g.degree(u)).collect();
    degrees.sort();
    assert_eq!((g.order(), degrees), (4, vec![1, 1, 2, 2]));
    let o = run(&["closure", "obstructions", "--class", "nope", "--nmax", "5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn families_and_dimensions() {
    let o = run(&["gen", "pin", "--n", "14", "--emit", "perm"]);
    assert_eq!(stdout(&o), r#"{"perm":[17,15,13,18,16,11,14,9,12,7,10,5,8,3,1,6,4,2]}"#);
    let o = run(&["gen", "Gn", "--n", "8", "--format", "g6"]);
    assert!(o.status.success());
    let o = run(&["gen", "Gn", "--n", "3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["perm", "--sigma", "2 1 3", "--format", "g6"]);
    assert_eq!(stdout(&o), "BW");
    let d = TempDir::new().unwrap();
    let c5 = write(d.path(), "C5.g6", "Dhc\n");
    let v: serde_json::Value = serde_json::from_str(&stdout(&run(&["vc", "--in", s(&c5)]))).unwrap();
    assert_eq!(v["vc"], 2);
    let fam = write(d.path(), "paths.g6", "Bo\nCh\nDhC\n");
    let v: serde_json::Value = serde_json::from_str(&stdout(&run(&["poset", "--family", s(&fam)]))).unwrap();
    assert_eq!(v["chain"], true);
    let o = run(&["hereditary", "--in", s(&c5)]);
    assert_eq!(stdout(&o), r#"{"is_cograph":false,"is_perfect":false}"#);
}

#[test]
fn interpret_agreement() {
    let d = TempDir::new().unwrap();
    let interp = write(
        d.path(),
        "agree.json",
        r#"{"source":[{"name":"E","arity":2}],"target":[{"name":"L1","arity":2},{"name":"L2","arity":2}],"defs":{"E":"x1!=x2 & (L1(x1,x2)<->L2(x1,x2))"}}"#,
    );
    let m = write(
        d.path(),
        "m.json",
        r#"{"language":[{"name":"L1","arity":2},{"name":"L2","arity":2}],"size":3,"relations":{"L1":[[1,2],[1,3],[2,3]],"L2":[[2,1],[2,3],[1,3]]}}"#,
    );
    let o = run(&["interpret", "--interp", s(&interp), "--in", s(&m), "--format", "g6"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "BW");
}

#[test]
fn verify_and_exit_codes() {
    let o = run(&["verify", "families", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["ok"], true);
    let again = run(&["verify", "families", "--seed", "7"]);
    let strip = |s: String| -> serde_json::Value {
        let mut v: serde_json::Value = serde_json::from_str(&s).unwrap();
        for c in v["checks"].as_array_mut().unwrap() {
            c["millis"] = 0.into();
        }
        v
    };
    assert_eq!(strip(stdout(&o)), strip(stdout(&again)));
    assert_eq!(run(&["verify", "bogus"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["prime", "--in", "/nonexistent/x.g6"]).status.code(), Some(3));
    let o = bin().args(["closure", "enum", "--primes", "/dev/null", "--nmax", "3"]).env("BLOWUPLAB_BUDGET", "zz").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}
