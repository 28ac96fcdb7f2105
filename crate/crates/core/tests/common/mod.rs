#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use rankmax::format::parse_instance;
use rankmax::solver::stage_labels;
use rankmax::{Engine, Instance, Label, Matching, Side};

pub fn data(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn instance(name: &str) -> Instance {
    parse_instance(&data(name)).unwrap()
}

pub fn pairs(inst: &Instance, names: &[(&str, &str)]) -> Matching {
    Matching::from_pairs(names.iter().map(|(a, p)| {
        (inst.lookup_side(a, Side::Applicant).unwrap().index, inst.lookup_side(p, Side::Post).unwrap().index)
    }))
    .unwrap()
}

pub fn named(inst: &Instance, m: &Matching) -> Vec<(String, String)> {
    let mut v = m.named_pairs(inst);
    v.sort();
    v
}

pub fn expect_pairs(names: &[(&str, &str)]) -> Vec<(String, String)> {
    let mut v: Vec<(String, String)> = names.iter().map(|(a, p)| (a.to_string(), p.to_string())).collect();
    v.sort();
    v
}

/// Engine started from a given rank-maximal matching.
pub fn engine_with(text: &str, matched: &[(&str, &str)]) -> Engine {
    let inst = parse_instance(text).unwrap();
    let m = pairs(&inst, matched);
    Engine::with_matching(inst, &m).unwrap()
}

/// Labels of live vertices at the given stage, by name.
pub fn labels(engine: &Engine, stage: u32) -> BTreeMap<String, Label> {
    let l = stage_labels(engine.result(), engine.instance(), stage).unwrap();
    engine.instance().vertices().map(|v| (engine.instance().name(v).to_string(), l.get(v))).collect()
}

pub fn final_labels(engine: &Engine) -> BTreeMap<String, Label> {
    labels(engine, engine.store().final_r())
}

/// Whether the reduced graph of `stage` still has the edge `(a, p)`.
pub fn has_reduced_edge(engine: &Engine, stage: u32, a: &str, p: &str) -> bool {
    let inst = engine.instance();
    let g = rankmax::reconstruct_reduced_graph(inst, engine.store(), stage).unwrap();
    let av = inst.lookup_side(a, Side::Applicant).unwrap();
    let pv = inst.lookup_side(p, Side::Post).unwrap();
    inst.edge_between(av.index, pv.index).is_some_and(|e| g.contains(e))
}

pub const ADD_I: &str = "a1 : p1\na2 : p1,(p2,p3)\na3 : p1,(p2,p4)\n";
pub const ADD_I_M: &[(&str, &str)] = &[("a1", "p1"), ("a2", "p3"), ("a3", "p2")];
pub const ADD_II: &str = "a1 : p1\na2 : p1\na3 : p1,(p2,p3,p4)\n";
pub const ADD_II_M: &[(&str, &str)] = &[("a1", "p1"), ("a3", "p2")];
pub const ADD_III: &str = "a1 : p1\na2 : p1,p2\na3 : p1,(p3,p4)\n";
pub const ADD_III_M: &[(&str, &str)] = &[("a1", "p1"), ("a2", "p2"), ("a3", "p3")];

pub const DEL_I: &str = "a1 : p1\na2 : p1,(p2,p3)\na3 : p1,p4\na4 : p1,p4\n";
pub const DEL_I_M: &[(&str, &str)] = &[("a1", "p1"), ("a2", "p2"), ("a3", "p4")];
pub const DEL_II: &str = "a1 : p1\na2 : p1,(p2,p4)\na3 : p1,p3\na4 : p1,p3\n";
pub const DEL_II_M: &[(&str, &str)] = &[("a1", "p1"), ("a2", "p2"), ("a4", "p3")];
pub const DEL_III: &str = "a1 : p1\na2 : p1\na3 : p1,p3\na4 : p1,(p2,p4)\n";
pub const DEL_III_M: &[(&str, &str)] = &[("a1", "p1"), ("a3", "p3"), ("a4", "p4")];
pub const DEL_IV: &str = "a1 : p1\na2 : p1,p2\na3 : p1,(p3,p4)\na4 : p1,p3\n";
pub const DEL_IV_M: &[(&str, &str)] = &[("a1", "p1"), ("a2", "p2"), ("a3", "p4"), ("a4", "p3")];
