//! Cross-checks of an engine state against a fresh solve and the oracle.

use std::collections::BTreeSet;
use std::fmt;

use crate::decomposition::{classify_eou, find_augmenting_path, Label};
use crate::dynamic::Engine;
use crate::instance::{Instance, VertexId};
use crate::matching::{validate_matching, Signature};
use crate::oracle::{brute_force_signature, OracleError};
use crate::solver::{reconstruct_reduced_graph, solve, stage_matching, SolveResult};

type NamedEdge = (String, String, u32);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mismatch {
    Signature { engine: Signature, fresh: Signature },
    FinalRank { engine: u32, fresh: u32 },
    ReducedGraph { stage: u32, only_engine: Vec<NamedEdge>, only_fresh: Vec<NamedEdge> },
    Labels { stage: u32, vertices: Vec<(String, Label, Label)> },
    Records { vertices: Vec<String>, edges: Vec<NamedEdge> },
    PrefixSignatures { engine: Vec<Signature>, fresh: Vec<Signature> },
    InvalidMatching(String),
    NotMaximum { stage: u32 },
    Oracle { engine: Signature, best: Signature },
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges = |es: &[NamedEdge]| -> String {
            es.iter().map(|(a, p, r)| format!("({a},{p},{r})")).collect::<Vec<_>>().join(" ")
        };
        match self {
            Mismatch::Signature { engine, fresh } => write!(f, "signature {engine} differs from fresh solve {fresh}"),
            Mismatch::FinalRank { engine, fresh } => write!(f, "final stage {engine} differs from fresh solve {fresh}"),
            Mismatch::ReducedGraph { stage, only_engine, only_fresh } => write!(
                f,
                "stage {stage}: reduced graphs differ; engine only: [{}]; fresh only: [{}]",
                edges(only_engine),
                edges(only_fresh)
            ),
            Mismatch::Labels { stage, vertices } => {
                let vs: Vec<String> = vertices.iter().map(|(n, a, b)| format!("{n}:{a}/{b}")).collect();
                write!(f, "stage {stage}: labels differ (engine/fresh) {}", vs.join(" "))
            }
            Mismatch::Records { vertices, edges: es } => {
                write!(f, "stage records differ for vertices [{}] and edges [{}]", vertices.join(" "), edges(es))
            }
            Mismatch::PrefixSignatures { engine, fresh } => {
                write!(f, "prefix signatures differ: {engine:?} vs {fresh:?}")
            }
            Mismatch::InvalidMatching(s) => write!(f, "invalid matching: {s}"),
            Mismatch::NotMaximum { stage } => write!(f, "stage {stage}: matching is not maximum in the reduced graph"),
            Mismatch::Oracle { engine, best } => write!(f, "signature {engine} is below the oracle's {best}"),
        }
    }
}

fn named(inst: &Instance, ids: impl IntoIterator<Item = crate::instance::EdgeId>) -> BTreeSet<NamedEdge> {
    ids.into_iter()
        .map(|e| {
            let edge = inst.edge(e).expect("live");
            (
                inst.name(VertexId::applicant(edge.applicant)).to_string(),
                inst.name(VertexId::post(edge.post)).to_string(),
                edge.rank,
            )
        })
        .collect()
}

/// Checks that `result` is internally consistent for `inst`: a valid
/// matching whose stage restrictions are maximum in the reduced graphs.
pub fn check_structure(inst: &Instance, result: &SolveResult) -> Result<(), Mismatch> {
    let report = validate_matching(inst, result.matching.pairs());
    if !report.is_ok() {
        return Err(Mismatch::InvalidMatching(report.to_string()));
    }
    for i in 1..=result.store.final_r() {
        let g = reconstruct_reduced_graph(inst, &result.store, i).expect("in range");
        let m = stage_matching(result, inst, i).expect("in range");
        if find_augmenting_path(&g, &m, None).expect("no roots").is_some() {
            return Err(Mismatch::NotMaximum { stage: i });
        }
    }
    Ok(())
}

/// Compares two results for the same instance: signature, reduced graphs
/// and labels at every stage, and the stored records.
pub fn compare_results(inst: &Instance, engine: &SolveResult, fresh: &SolveResult) -> Result<(), Mismatch> {
    if engine.signature != fresh.signature {
        return Err(Mismatch::Signature { engine: engine.signature.clone(), fresh: fresh.signature.clone() });
    }
    let (re, rf) = (engine.store.final_r(), fresh.store.final_r());
    if re != rf {
        return Err(Mismatch::FinalRank { engine: re, fresh: rf });
    }
    for i in 1..=rf + 1 {
        let ge = reconstruct_reduced_graph(inst, &engine.store, i).expect("in range");
        let gf = reconstruct_reduced_graph(inst, &fresh.store, i).expect("in range");
        let (se, sf) = (named(inst, ge.edge_ids()), named(inst, gf.edge_ids()));
        if se != sf {
            return Err(Mismatch::ReducedGraph {
                stage: i,
                only_engine: se.difference(&sf).cloned().collect(),
                only_fresh: sf.difference(&se).cloned().collect(),
            });
        }
        if i > rf {
            continue;
        }
        let le = classify_eou(&ge, &stage_matching(engine, inst, i).expect("in range"));
        let lf = classify_eou(&gf, &stage_matching(fresh, inst, i).expect("in range"));
        let differing: Vec<(String, Label, Label)> = inst
            .vertices()
            .filter(|&v| le.get(v) != lf.get(v))
            .map(|v| (inst.name(v).to_string(), le.get(v), lf.get(v)))
            .collect();
        if !differing.is_empty() {
            return Err(Mismatch::Labels { stage: i, vertices: differing });
        }
    }
    let (ve, ee) = engine.store.live_view(inst);
    let (vf, ef) = fresh.store.live_view(inst);
    if ve != vf || ee != ef {
        let vertices = ve.iter().zip(&vf).filter(|(x, y)| x != y).map(|((v, _), _)| inst.name(*v).to_string()).collect();
        let edges = named(inst, ee.iter().zip(&ef).filter(|(x, y)| x != y).map(|((e, _), _)| *e)).into_iter().collect();
        return Err(Mismatch::Records { vertices, edges });
    }
    if engine.store.per_stage_signature() != fresh.store.per_stage_signature() {
        return Err(Mismatch::PrefixSignatures {
            engine: engine.store.per_stage_signature().to_vec(),
            fresh: fresh.store.per_stage_signature().to_vec(),
        });
    }
    Ok(())
}

/// Compares the engine with a fresh solve of its instance.
pub fn verify_engine(engine: &Engine) -> Result<(), Mismatch> {
    check_structure(engine.instance(), engine.result())?;
    let fresh = solve(engine.instance());
    compare_results(engine.instance(), engine.result(), &fresh)
}

/// Compares the engine's signature with the oracle. Instances above
/// `limit` vertices are skipped and reported as `Ok(false)`.
pub fn verify_oracle(engine: &Engine, limit: usize) -> Result<bool, Mismatch> {
    match brute_force_signature(engine.instance(), limit) {
        Ok(r) if r.best_signature == *engine.signature() => Ok(true),
        Ok(r) => Err(Mismatch::Oracle { engine: engine.signature().clone(), best: r.best_signature }),
        Err(OracleError::TooLarge { .. }) => Ok(false),
        Err(OracleError::Matching(e)) => Err(Mismatch::InvalidMatching(e.to_string())),
    }
}

/// Counts of even, odd and unreachable vertices among live vertices.
pub fn label_counts(inst: &Instance, labels: &crate::decomposition::EouLabeling) -> [usize; 3] {
    let mut c = [0; 3];
    for v in inst.vertices() {
        c[match labels.get(v) {
            Label::Even => 0,
            Label::Odd => 1,
            Label::Unreachable => 2,
        }] += 1;
    }
    c
}
