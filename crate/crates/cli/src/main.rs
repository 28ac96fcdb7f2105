use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rankmax::bench::{parse_grid, run_point, CSV_HEADER};
use rankmax::dynamic::{Fault, UpdateReport};
use rankmax::format::{parse_instance, write_instance, write_matching};
use rankmax::generate::{drop_isolated_posts, random_instance, rng, GenParams};
use rankmax::ops::{parse_ops, Op};
use rankmax::oracle::DEFAULT_LIMIT;
use rankmax::solver::max_used_rank;
use rankmax::store::write_store;
use rankmax::verify::{verify_engine, verify_oracle};
use rankmax::{solve, Engine, Instance, Matching, VertexId};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "rankmax", version, about = "Rank-maximal matchings, computed from scratch or maintained under updates")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute a rank-maximal matching.
    Solve {
        #[arg(short = 'i', long = "input")]
        input: PathBuf,
        /// Write the stage records to this file.
        #[arg(long)]
        store: Option<PathBuf>,
    },
    /// Replay an operation log through the dynamic engine.
    Update {
        #[arg(short = 'i', long = "input")]
        input: PathBuf,
        #[arg(short = 'o', long = "ops")]
        ops: PathBuf,
    },
    /// Replay an operation log, checking the engine against a fresh solve
    /// and, on small instances, against exhaustive search.
    Verify {
        #[arg(short = 'i', long = "input")]
        input: PathBuf,
        #[arg(short = 'o', long = "ops")]
        ops: PathBuf,
        /// Largest vertex count handed to exhaustive search.
        #[arg(long, default_value_t = DEFAULT_LIMIT)]
        oracle_limit: usize,
        /// Skip odd-odd pruning at this stage (negative control).
        #[arg(long, hide = true)]
        skip_pruning_at: Option<u32>,
    },
    /// Time one update against one full solve over a grid of sizes.
    Bench {
        /// Points `N,M,R` separated by `;`.
        #[arg(long)]
        grid: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        reps: usize,
    },
    /// Write a random instance in the preference-list format.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        r: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum Failure {
    Input(String),
    Verification,
}

type Run = Result<(), Failure>;

fn input_err(e: impl std::fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    parse_instance(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_ops(path: &Path) -> Result<Vec<(usize, Op)>, Failure> {
    parse_ops(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn matching_json(inst: &Instance, m: &Matching) -> Value {
    let mut pairs: Vec<(String, String, u32)> = m
        .pairs()
        .map(|(a, p)| {
            let (va, vp) = (VertexId::applicant(a), VertexId::post(p));
            (inst.name(va).to_string(), inst.name(vp).to_string(), inst.rank_of(a, p).unwrap_or(0))
        })
        .collect();
    pairs.sort();
    json!(pairs)
}

fn summary(out: &mut String, engine: &Engine) {
    let inst = engine.instance();
    let _ = writeln!(out, "signature {}", engine.signature());
    let _ = writeln!(out, "max used rank {}", max_used_rank(inst, engine.matching()));
    let _ = writeln!(out, "matching");
    out.push_str(&write_matching(inst, engine.matching()));
}

fn summary_json(engine: &Engine) -> Value {
    let inst = engine.instance();
    json!({
        "signature": engine.signature(),
        "max_used_rank": max_used_rank(inst, engine.matching()),
        "matching": matching_json(inst, engine.matching()),
    })
}

fn solve_cmd(json: bool, input: &Path, store: Option<&Path>) -> Run {
    let inst = load_instance(input)?;
    let res = solve(&inst);
    if let Some(path) = store {
        fs::write(path, write_store(&inst, &res.store)).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    }
    let engine = Engine::new(inst);
    if json {
        println!("{}", summary_json(&engine));
    } else {
        let mut out = String::new();
        summary(&mut out, &engine);
        print!("{out}");
    }
    Ok(())
}

fn report_text(out: &mut String, line: usize, op: &Op, r: &UpdateReport) {
    let _ = writeln!(out, "line {line}: {op}");
    let _ = writeln!(out, "  signature {} -> {}", r.old_signature, r.new_signature);
    let _ = writeln!(
        out,
        "  stages {}, augmentations {}, edges deleted {}, restored {}",
        r.stages_touched, r.augmentations, r.edges_deleted, r.edges_restored
    );
    for (stage, case) in &r.cases {
        let _ = writeln!(out, "  stage {stage}: {case:?}");
    }
    for (stage, path) in &r.paths {
        let _ = writeln!(out, "  stage {stage}: augmenting path {}", path.join(","));
    }
    if !r.size_bound_violations.is_empty() {
        let _ = writeln!(out, "  size bound left at stages {:?}", r.size_bound_violations);
    }
}

fn update_cmd(json: bool, input: &Path, ops_path: &Path) -> Run {
    let mut engine = Engine::new(load_instance(input)?);
    let ops = load_ops(ops_path)?;
    let mut out = String::new();
    let mut reports = Vec::new();
    for (line, op) in &ops {
        let r = engine
            .apply(op)
            .map_err(|e| Failure::Input(format!("{}:{line}: `{op}`: {e}", ops_path.display())))?;
        if json {
            reports.push(json!({ "line": line, "op": op.to_string(), "report": r }));
        } else {
            report_text(&mut out, *line, op, &r);
        }
    }
    if json {
        let mut v = summary_json(&engine);
        v["reports"] = Value::Array(reports);
        println!("{v}");
    } else {
        summary(&mut out, &engine);
        print!("{out}");
    }
    Ok(())
}

fn verify_cmd(json: bool, input: &Path, ops_path: &Path, limit: usize, skip: Option<u32>) -> Run {
    let mut engine = Engine::new(load_instance(input)?);
    engine.set_fault(skip.map(|stage| Fault::SkipPruning { stage }));
    let ops = load_ops(ops_path)?;
    let (mut oracle_checked, mut applied) = (0, 0);
    let mut failure = None;
    for step in std::iter::once(None).chain(ops.iter().map(Some)) {
        let at = match step {
            Some((line, op)) => {
                engine
                    .apply(op)
                    .map_err(|e| Failure::Input(format!("{}:{line}: `{op}`: {e}", ops_path.display())))?;
                applied += 1;
                format!("line {line} `{op}`")
            }
            None => "initial instance".to_string(),
        };
        let checked = verify_engine(&engine).and_then(|()| verify_oracle(&engine, limit));
        match checked {
            Ok(true) => oracle_checked += 1,
            Ok(false) => {}
            Err(m) => {
                failure = Some((at, m.to_string()));
                break;
            }
        }
    }
    if json {
        let fail = failure.as_ref().map(|(at, msg)| json!({ "at": at, "mismatch": msg }));
        println!(
            "{}",
            json!({ "ok": failure.is_none(), "ops": applied, "oracle_checked": oracle_checked, "failure": fail })
        );
    } else {
        match &failure {
            Some((at, msg)) => println!("FAIL at {at}: {msg}"),
            None => println!(
                "PASS {applied} ops; oracle compared at {oracle_checked} of {} states",
                applied + 1
            ),
        }
    }
    match failure {
        Some(_) => Err(Failure::Verification),
        None => Ok(()),
    }
}

fn bench_cmd(json: bool, grid: &str, seed: u64, reps: usize) -> Run {
    let points = parse_grid(grid).map_err(input_err)?;
    let rows: Vec<_> = points.into_iter().map(|p| run_point(p, seed, reps)).collect();
    if json {
        let v: Vec<Value> = rows
            .iter()
            .map(|r| json!({ "n": r.n, "m": r.m, "r": r.r, "update_us": r.update_us, "solve_us": r.solve_us, "ratio": r.ratio() }))
            .collect();
        println!("{}", Value::Array(v));
    } else {
        println!("{CSV_HEADER}");
        for r in rows {
            println!("{}", r.csv());
        }
    }
    Ok(())
}

fn gen_cmd(n: usize, m: usize, r: u32, seed: u64) -> Run {
    if r == 0 {
        return Err(Failure::Input("--r must be at least 1".into()));
    }
    let mut inst = random_instance(GenParams { n, m, r, consecutive: true }, &mut rng(seed));
    drop_isolated_posts(&mut inst);
    print!("{}", write_instance(&inst).map_err(input_err)?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Solve { input, store } => solve_cmd(cli.json, input, store.as_deref()),
        Cmd::Update { input, ops } => update_cmd(cli.json, input, ops),
        Cmd::Verify { input, ops, oracle_limit, skip_pruning_at } => {
            verify_cmd(cli.json, input, ops, *oracle_limit, *skip_pruning_at)
        }
        Cmd::Bench { grid, seed, reps } => bench_cmd(cli.json, grid, *seed, *reps),
        Cmd::Gen { n, m, r, seed } => gen_cmd(*n, *m, *r, *seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
