use std::path::PathBuf;
use std::process::{Command, Output};

use rankmax::format::{parse_instance, write_instance};
use rankmax::generate::{random_instance, random_op, rng, GenParams};
use rankmax::store::parse_store;
use rankmax::{solve, Engine};

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rankmax")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const M: &str = "a1 p1 1\na2 p2 3\na3 p3 5\na4 p4 7\na5 p5 1\na6 p6 1\na7 p7 1\n";
const M_PRIME: &str = "a1 p8 1\na2 p1 2\na3 p2 4\na4 p3 6\na5 p5 1\na6 p6 1\na7 p7 1\n";

#[test]
fn solve_chain_instance() {
    let o = run(&["solve", "-i", &data("chain.txt")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("signature (4,0,1,0,1,0,1)\nmax used rank 7\n"), "{out}");
    assert!(out.ends_with(&format!("matching\n{M}")), "{out}");
}

#[test]
fn solve_writes_store() {
    let store = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("chain.store");
    let o = run(&["solve", "-i", &data("chain.txt"), "--store", store.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let inst = parse_instance(&std::fs::read_to_string(data("chain.txt")).unwrap()).unwrap();
    let res = solve(&inst);
    let text = std::fs::read_to_string(&store).unwrap();
    assert!(text.lines().all(|l| l.starts_with("V ") || l.starts_with("E ")));
    assert_eq!(parse_store(&inst, &res.matching, &text).unwrap(), res.store);
}

#[test]
fn solve_empty_instance() {
    let o = run(&["solve", "-i", scratch("empty.txt", "").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "signature ()\nmax used rank 0\nmatching\n");
}

#[test]
fn solve_json() {
    let o = run(&["--json", "solve", "-i", &data("chain.txt")]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["signature"], serde_json::json!([4, 0, 1, 0, 1, 0, 1]));
    assert_eq!(v["matching"][1], serde_json::json!(["a2", "p2", 3]));
}

#[test]
fn malformed_instance_is_an_input_error() {
    let o = run(&["solve", "-i", scratch("bad.txt", "a1 : p1\na2 p2\n").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
    let o = run(&["solve", "-i", "/nonexistent/instance.txt"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn update_adds_edge() {
    let o = run(&["update", "-i", &data("chain.txt"), "-o", &data("chain_add.ops")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("line 1: adde a1 p8 1\n"), "{out}");
    assert!(out.ends_with(&format!("matching\n{M_PRIME}")), "{out}");
}

#[test]
fn update_round_trip_restores_signature() {
    let o = run(&["--json", "update", "-i", &data("chain.txt"), "-o", &data("chain_roundtrip.ops")]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["signature"], serde_json::json!([4, 0, 1, 0, 1, 0, 1]));
    assert_eq!(v["reports"].as_array().unwrap().len(), 2);
    assert_eq!(v["reports"][1]["line"], 2);
}

#[test]
fn update_names_offending_line() {
    let ops = scratch("unknown.ops", "adde a1 p8 1\n\n# comment\ndele a1 zz\n");
    let o = run(&["update", "-i", &data("chain.txt"), "-o", ops.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown.ops:4: `dele a1 zz`"), "{}", stderr(&o));
}

#[test]
fn verify_chain_sequence() {
    let o = run(&["verify", "-i", &data("chain.txt"), "-o", &data("chain_roundtrip.ops"), "--oracle-limit", "16"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o), "PASS 2 ops; oracle compared at 3 of 3 states\n");
}

#[test]
fn verify_skips_oracle_above_limit() {
    let o = run(&["--json", "verify", "-i", &data("chain.txt"), "-o", &data("chain_add.ops")]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["ok"], true);
    assert_eq!(v["oracle_checked"], 0);
}

#[test]
fn verify_random_sequence() {
    let mut g = rng(41);
    let mut inst = random_instance(GenParams { n: 10, m: 16, r: 3, consecutive: true }, &mut g);
    rankmax::generate::drop_isolated_posts(&mut inst);
    let text = write_instance(&inst).unwrap();
    let mut engine = Engine::new(inst);
    let mut next = 0;
    let mut ops = String::new();
    for _ in 0..200 {
        let op = random_op(engine.instance(), 3, 10, &mut next, &mut g);
        engine.apply(&op).unwrap();
        ops += &format!("{op}\n");
    }
    let i = scratch("fuzz.txt", &text);
    let o = scratch("fuzz.ops", &ops);
    let out = run(&["verify", "-i", i.to_str().unwrap(), "-o", o.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).starts_with("PASS 200 ops; oracle compared at 201 of 201"));
}

#[test]
fn verify_catches_skipped_pruning() {
    let o = run(&[
        "verify",
        "-i",
        &data("chain.txt"),
        "-o",
        &data("chain_add.ops"),
        "--skip-pruning-at",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.starts_with("FAIL at line 1 `adde a1 p8 1`: stage 2: reduced graphs differ"), "{out}");
    assert!(out.contains("(a2,p5,1)"), "{out}");
}

#[test]
fn bench_prints_csv() {
    let o = run(&["bench", "--grid", "40,80,1;40,80,3", "--seed", "2", "--reps", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "n,m,r,update_us,solve_us");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("40,80,1,") && lines[2].starts_with("40,80,3,"));
    assert_eq!(run(&["bench", "--grid", "40,80"]).status.code(), Some(2));
}

#[test]
fn gen_is_deterministic_and_parses() {
    let args = ["gen", "--n", "12", "--m", "20", "--r", "3", "--seed", "5"];
    let a = stdout(&run(&args));
    assert_eq!(a, stdout(&run(&args)));
    let inst = parse_instance(&a).unwrap();
    assert!(inst.num_edges() > 0 && inst.max_rank() <= 3);
    assert_eq!(run(&["gen", "--n", "4", "--m", "2", "--r", "0"]).status.code(), Some(2));
}
