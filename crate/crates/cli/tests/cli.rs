use serde_json::Value;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_distinguo"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env_remove("DISTINGUO_BUDGET").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const EVENS: &str = "sig R:1\nperiodic\nR = cycle:10\n";
const ODDS: &str = "sig R:1\nperiodic\nR = cycle:01\n";

#[test]
fn count_finite_and_periodic() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "m", "sig R:1\nfinite 3\nR = {0,2}\n");
    let o = run(&["count", s(&m), "R(v0)"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().next(), Some("fin:2"));
    assert!(out.contains("realizations: {(0),(2)}"));

    let evens = write(dir.path(), "evens", EVENS);
    let o = run(&["count", s(&evens), "R(v0)"]);
    assert_eq!(stdout(&o).lines().next(), Some("inf"));
    assert_eq!(json(&run(&["--json", "count", s(&evens), "R(v0)"]))["count"], "inf");

    let o = run(&["count", s(&m), "E v0. R(v0)", "--json"]);
    let doc = json(&o);
    assert_eq!(doc["count"]["fin"], 1);
    assert_eq!(doc["realizations"], "{()}");
}

#[test]
fn distinguish_examples() {
    let dir = TempDir::new().unwrap();
    let a = write(dir.path(), "a", "# unary\nR(v0)\n");
    let two = write(dir.path(), "two", "sig R:1\nfinite 4\nR = {0,1}\n");
    let three = write(dir.path(), "three", "sig R:1\nfinite 4\nR = {0,1,2}\n");
    let o = run(&["--json", "distinguish", s(&two), s(&three), s(&a)]);
    assert_eq!(o.status.code(), Some(1));
    let doc = json(&o);
    assert_eq!(doc["distinction"]["formula"], "R(v0)");
    assert_eq!(doc["distinction"]["left"]["fin"], 2);
    assert_eq!(doc["distinction"]["right"]["fin"], 3);

    assert_eq!(run(&["distinguish", s(&two), s(&two), s(&a)]).status.code(), Some(0));

    let both = write(dir.path(), "both", "R(v0)\n~R(v0)\n");
    let evens = write(dir.path(), "evens", EVENS);
    let odds = write(dir.path(), "odds", ODDS);
    let o = run(&["distinguish", s(&evens), s(&odds), s(&both)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn distinguish_with_fragment_and_game() {
    let dir = TempDir::new().unwrap();
    let one = write(dir.path(), "one", "sig R:1\nfinite 3\nR = {0}\n");
    let two = write(dir.path(), "two", "sig R:1\nfinite 3\nR = {0,1}\n");
    let o = run(&[
        "--json",
        "distinguish",
        s(&one),
        s(&two),
        "--max-fragment",
        "1",
        "--ef-rank",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let doc = json(&o);
    // one round cannot tell one R-element from two when both have a non-R element
    assert_eq!(doc["ef"]["equivalent"], true);
    let zero = write(dir.path(), "zero", "sig R:1\nfinite 3\nR = {}\n");
    let o = run(&[
        "distinguish",
        s(&zero),
        s(&one),
        "--max-fragment",
        "0",
        "--ef-rank",
        "2",
    ]);
    assert!(stdout(&o).contains("spoiler wins"), "{}", stdout(&o));
}

fn unary_dir() -> TempDir {
    let dir = TempDir::new().unwrap();
    for mask in 0..8u32 {
        let r: Vec<String> = (0..3).filter(|i| mask >> i & 1 == 1).map(|i| i.to_string()).collect();
        write(
            dir.path(),
            &format!("m{mask}.txt"),
            &format!("sig R:1\nfinite 3\nR = {{{}}}\n", r.join(",")),
        );
    }
    dir
}

#[test]
fn classify_examples() {
    let dir = unary_dir();
    let a_dir = TempDir::new().unwrap();
    let a = write(a_dir.path(), "a", "R(v0)\n");
    let classes = |extra: &[&str]| -> u64 {
        let mut args = vec!["--json", "classify", s(dir.path())];
        args.extend_from_slice(extra);
        let o = run(&args);
        assert_eq!(o.status.code(), Some(0), "{:?}", String::from_utf8_lossy(&o.stderr));
        json(&o)["class_count"].as_u64().unwrap()
    };
    assert_eq!(classes(&["--ea", s(&a)]), 4);
    assert_eq!(classes(&["--iso"]), 4);
    assert_eq!(classes(&["--ef-rank", "1"]), 3);
    assert_eq!(classes(&["--ef", "0"]), 1);
    assert_eq!(classes(&["--iso", "--parallel"]), 4);

    let o = run(&["classify", s(dir.path()), "--iso"]);
    assert!(stdout(&o).starts_with("8 structures, 4 classes under iso\nclass 0 (representative m0.txt): m0.txt\n"));
}

#[test]
fn classify_rejects_mixed_signatures() {
    let dir = unary_dir();
    write(dir.path(), "z.txt", "sig R:1 S:2\nfinite 3\n");
    let o = run(&["classify", s(dir.path()), "--iso"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("signatures differ"));
}

#[test]
fn borel_check_examples() {
    let dir = TempDir::new().unwrap();
    let a = write(dir.path(), "a", "R(v0)\n");
    let m = write(dir.path(), "m", "sig R:1 S:2\nfinite 3\nR = {1}\nS = {(0,1)}\n");
    let a2 = write(dir.path(), "a2", "R(v0)\nE v1. S(v0,v1)\n");
    let o = run(&["borel-check", s(&m), s(&m), s(&a2)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("AGREE"));

    let evens = write(dir.path(), "evens", EVENS);
    let odds = write(dir.path(), "odds", ODDS);
    let o = run(&["--json", "borel-check", s(&evens), s(&odds), s(&a)]);
    assert_eq!(o.status.code(), Some(0));
    let doc = json(&o);
    assert_eq!(doc["borel"], true);
    assert_eq!(doc["steps"][0]["branch"], "infinite");
    assert_eq!(doc["agree"], true);

    let one = write(dir.path(), "one", "sig R:1\nfinite 3\nR = {0}\n");
    let two = write(dir.path(), "two", "sig R:1\nfinite 3\nR = {0,1}\n");
    let o = run(&["--json", "borel-check", s(&one), s(&two), s(&a)]);
    assert_eq!(o.status.code(), Some(1));
    let doc = json(&o);
    assert_eq!(
        (doc["e_equiv"].clone(), doc["borel"].clone()),
        (Value::Bool(false), Value::Bool(false))
    );
    assert_eq!(doc["remark"]["verdict"], false);
    assert_eq!(doc["remark"]["n_max"], 4);
    assert_eq!(doc["agree"], true);
}

#[test]
fn borel_check_truncation() {
    let dir = TempDir::new().unwrap();
    let a = write(dir.path(), "a", "R(v0)\n");
    let m = write(dir.path(), "m", "sig R:1\nfinite 3\nR = {0}\n");
    let o = run(&["borel-check", s(&m), s(&m), s(&a), "--nmax", "2"]);
    assert!(stdout(&o).contains("remark: not run"), "{}", stdout(&o));
    let o = run(&["borel-check", s(&m), s(&m), s(&a), "--nmax", "9"]);
    assert!(stdout(&o).contains("remark: true (n_max 9)"));
}

#[test]
fn vaught_demo_census() {
    let o = run(&["--json", "vaught-demo"]);
    assert_eq!(o.status.code(), Some(0));
    let doc = json(&o);
    assert_eq!(doc["violations"].as_array().unwrap().len(), 0);
    let classes = doc["classes"].as_array().unwrap();
    let key = |c: &Value| c["key"].to_string();
    let fin3_inf = classes
        .iter()
        .find(|c| key(c) == r#"[{"fin":3},"inf"]"#)
        .expect("(fin:3, inf) realized");
    assert!(fin3_inf["theta"].is_array());
    assert!(classes.iter().all(|c| key(c) != r#"[{"fin":2},{"fin":1}]"#));
    assert!(classes.iter().all(|c| c["key"].to_string().contains("inf")));

    let small = run(&["vaught-demo", "--prefix", "2", "--cycle", "2", "--parallel"]);
    assert_eq!(small.status.code(), Some(0));
    assert!(stdout(&small).contains(", 0 violations"));
}

#[test]
fn deterministic_modulo_timing() {
    let strip = |o: Output| -> String {
        stdout(&o)
            .lines()
            .filter(|l| !l.starts_with("time:") && !l.contains("elapsed_ms"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let dir = unary_dir();
    for json_flag in [false, true] {
        let mut args = vec!["classify", s(dir.path()), "--ef-rank", "2", "--parallel"];
        if json_flag {
            args.push("--json");
        }
        assert_eq!(strip(run(&args)), strip(run(&args)));
    }
    assert_eq!(
        strip(run(&["vaught-demo", "--prefix", "3", "--cycle", "2", "--parallel"])),
        strip(run(&["vaught-demo", "--prefix", "3", "--cycle", "2"]))
    );
}

#[test]
fn input_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "bad", "sig R:1\nfinite 2\nR = {0,7}\n");
    let o = run(&["count", s(&bad), "R(v0)"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    let m = write(dir.path(), "m", "sig R:1\nfinite 2\n");
    let o = run(&["count", s(&m), "R(v0) &"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("byte"));

    let a = write(dir.path(), "a", "R(v0)\n\nQ(v0)\n");
    let o = run(&["distinguish", s(&m), s(&m), s(&a)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    assert_eq!(run(&["distinguish", s(&m), s(&m)]).status.code(), Some(2));
    assert_eq!(run(&["count", "/nonexistent/file", "R(v0)"]).status.code(), Some(2));
    assert_eq!(run(&["vaught-demo", "--cycle", "0"]).status.code(), Some(2));
}

#[test]
fn budget_from_environment() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "m", "sig R:1\nfinite 6\nR = {0,1,2}\n");
    let n = write(dir.path(), "n", "sig R:1\nfinite 6\nR = {3,4,5}\n");
    let o = bin()
        .args(["distinguish", s(&m), s(&n), "--max-fragment", "0", "--ef-rank", "3"])
        .env("DISTINGUO_BUDGET", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
    let o = bin()
        .args(["count", s(&m), "R(v0)"])
        .env("DISTINGUO_BUDGET", "lots")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "count ignores the budget");
    let o = bin()
        .args(["distinguish", s(&m), s(&n), "--max-fragment", "0", "--ef-rank", "1"])
        .env("DISTINGUO_BUDGET", "lots")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
