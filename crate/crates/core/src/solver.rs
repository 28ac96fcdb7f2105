//! Stage-wise rank-maximal matching.
//!
//! Stage `i` admits the rank-`i` edges whose endpoints are still even,
//! augments the carried matching to a maximum one, labels the stage graph
//! and prunes odd–odd and odd–unreachable edges. Every deletion and every
//! first departure from even is written to a [`PreprocessStore`], from which
//! any reduced graph can be rebuilt in one pass over the edges.

use thiserror::Error;

use crate::decomposition::{classify_eou, maximize, EouLabeling, Label, ScanOrder, StageGraph};
use crate::instance::{EdgeId, Instance, VertexId};
use crate::matching::{signature_of, validate_matching, Matching, MatchingError, Signature};
use crate::store::{DeletionCause, EdgeStageRecord, PreprocessStore, VertexKind, VertexStageRecord};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("stage {stage} is outside 0..={max}")]
    StageOutOfRange { stage: u32, max: u32 },
    #[error("matching with signature {given} is not rank-maximal; {best} is attainable")]
    NotRankMaximal { given: Signature, best: Signature },
    #[error(transparent)]
    Matching(#[from] MatchingError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub matching: Matching,
    pub store: PreprocessStore,
    pub signature: Signature,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SolveOptions {
    pub order: ScanOrder,
}

/// The reduced graph, labels and matching right after stage `stage`.
#[derive(Clone, Debug)]
pub struct StageSnapshot {
    pub stage: u32,
    pub edges: Vec<EdgeId>,
    pub labels: EouLabeling,
    pub matching: Matching,
}

pub fn solve(inst: &Instance) -> SolveResult {
    run(inst, SolveOptions::default(), None, None)
}

pub fn solve_with_options(inst: &Instance, opts: SolveOptions) -> SolveResult {
    run(inst, opts, None, None)
}

/// Runs the solver and keeps a snapshot of every stage.
pub fn solve_instrumented(inst: &Instance, opts: SolveOptions) -> (SolveResult, Vec<StageSnapshot>) {
    let mut snaps = Vec::new();
    let res = run(inst, opts, None, Some(&mut snaps));
    (res, snaps)
}

/// Runs the solver seeded with `m` at every stage. Succeeds, returning a
/// result whose matching is `m`, exactly when `m` is rank-maximal.
pub fn solve_with_matching(inst: &Instance, m: &Matching) -> Result<SolveResult, SolveError> {
    let report = validate_matching(inst, m.pairs());
    if !report.is_ok() {
        return Err(MatchingError::Invalid(report).into());
    }
    let res = run(inst, SolveOptions::default(), Some(m), None);
    if res.matching != *m {
        return Err(SolveError::NotRankMaximal {
            given: signature_of(inst, m)?,
            best: res.signature,
        });
    }
    Ok(res)
}

fn run(
    inst: &Instance,
    opts: SolveOptions,
    seed: Option<&Matching>,
    mut snaps: Option<&mut Vec<StageSnapshot>>,
) -> SolveResult {
    let mut store = PreprocessStore::for_instance(inst);
    let r = inst.max_rank();
    let by_rank = inst.edges_by_rank();
    let mut m = Matching::new();
    for i in 1..=r {
        let mut g = admit_stage(inst, &mut store, i, &by_rank[i as usize]);
        if let Some(seed) = seed {
            for &e in &by_rank[i as usize] {
                let edge = inst.edge(e).expect("live");
                let (a, p) = (VertexId::applicant(edge.applicant), VertexId::post(edge.post));
                if seed.contains(edge.applicant, edge.post) && g.contains(e) && !m.is_matched(a) && !m.is_matched(p) {
                    m.insert(edge.applicant, edge.post).expect("both free");
                }
            }
        }
        maximize(&g, &mut m, opts.order);
        let labels = settle_stage(inst, &mut store, &mut g, &m, i, true);
        store.per_stage_signature.push(prefix_signature(inst, &m, i));
        if let Some(snaps) = snaps.as_deref_mut() {
            snaps.push(StageSnapshot { stage: i, edges: g.edge_ids(), labels, matching: m.clone() });
        }
    }
    final_cleanup(inst, &mut store, &m, r);
    store.final_r = r;
    let signature = signature_of(inst, &m).expect("solver keeps the matching inside the instance");
    SolveResult { matching: m, store, signature }
}

/// Marks rank-`i` edges on blocked vertices as deleted and returns the
/// stage graph before augmentation: every edge of rank at most `i` without
/// a deletion record.
pub(crate) fn admit_stage(inst: &Instance, store: &mut PreprocessStore, i: u32, rank_i: &[EdgeId]) -> StageGraph {
    for &e in rank_i {
        let edge = inst.edge(e).expect("live");
        let a = store.vertex(VertexId::applicant(edge.applicant)).blocked_before(i);
        let p = store.vertex(VertexId::post(edge.post)).blocked_before(i);
        if let Some(s) = a.into_iter().chain(p).min() {
            store.set_edge(e, EdgeStageRecord::at(s, DeletionCause::HigherRankOnOddOrUnreachable));
        }
    }
    StageGraph::from_filter(inst, i, |e| {
        inst.edge(e).expect("live").rank <= i && store.edge(e).deleted.is_none()
    })
}

fn is_prunable(x: Label, y: Label) -> bool {
    matches!(
        (x, y),
        (Label::Odd, Label::Odd) | (Label::Odd, Label::Unreachable) | (Label::Unreachable, Label::Odd)
    )
}

/// Labels the stage graph for a maximum matching `m`, records first
/// departures from even, and (when `prune`) removes odd–odd and
/// odd–unreachable edges.
pub(crate) fn settle_stage(
    inst: &Instance,
    store: &mut PreprocessStore,
    g: &mut StageGraph,
    m: &Matching,
    i: u32,
    prune: bool,
) -> EouLabeling {
    let labels = classify_eou(g, m);
    for v in inst.vertices() {
        if store.vertex(v).became.is_some() {
            continue;
        }
        let kind = match labels.get(v) {
            Label::Even => continue,
            Label::Odd => VertexKind::Odd,
            Label::Unreachable => VertexKind::Unreachable,
        };
        store.set_vertex(v, VertexStageRecord::at(i, kind));
    }
    if prune {
        for e in g.edge_ids() {
            let edge = inst.edge(e).expect("live");
            let la = labels.get(VertexId::applicant(edge.applicant));
            let lp = labels.get(VertexId::post(edge.post));
            if is_prunable(la, lp) {
                g.remove_edge(e);
                store.set_edge(e, EdgeStageRecord::at(i, DeletionCause::OddOdd));
            }
        }
    }
    labels
}

/// Deletes odd–unreachable edges left after the last stage.
pub(crate) fn final_cleanup(inst: &Instance, store: &mut PreprocessStore, m: &Matching, r: u32) {
    let g = graph_from_store(inst, store, r);
    let mi = restrict(inst, m, r);
    let labels = classify_eou(&g, &mi);
    for e in g.edge_ids() {
        let edge = inst.edge(e).expect("live");
        let la = labels.get(VertexId::applicant(edge.applicant));
        let lp = labels.get(VertexId::post(edge.post));
        if matches!((la, lp), (Label::Odd, Label::Unreachable) | (Label::Unreachable, Label::Odd)) {
            store.set_edge(e, EdgeStageRecord::at(r + 1, DeletionCause::FinalCleanup));
        }
    }
}

/// Counts of matched pairs per rank, for ranks up to `i`.
pub(crate) fn prefix_signature(inst: &Instance, m: &Matching, i: u32) -> Signature {
    let mut counts = vec![0u32; i as usize];
    for (a, p) in m.pairs() {
        if let Some(r) = inst.rank_of(a, p) {
            if r <= i {
                counts[r as usize - 1] += 1;
            }
        }
    }
    Signature::new(counts)
}

fn restrict(inst: &Instance, m: &Matching, i: u32) -> Matching {
    Matching::from_pairs(m.pairs().filter(|&(a, p)| inst.rank_of(a, p).is_some_and(|r| r <= i)))
        .expect("subset of a matching")
}

fn graph_from_store(inst: &Instance, store: &PreprocessStore, i: u32) -> StageGraph {
    StageGraph::from_filter(inst, i, |e| {
        inst.edge(e).expect("live").rank <= i && store.edge(e).alive_at(i)
    })
}

/// Rebuilds the reduced graph of stage `i` from the store: edges of rank at
/// most `i` not deleted by the end of stage `i`. Stage `final_r + 1` is the
/// graph after the final cleanup.
pub fn reconstruct_reduced_graph(inst: &Instance, store: &PreprocessStore, i: u32) -> Result<StageGraph, SolveError> {
    let max = store.final_r + 1;
    if i > max {
        return Err(SolveError::StageOutOfRange { stage: i, max });
    }
    Ok(graph_from_store(inst, store, i))
}

/// The pairs of the final matching that belong to the reduced graph of
/// stage `i`.
pub fn stage_matching(result: &SolveResult, inst: &Instance, i: u32) -> Result<Matching, SolveError> {
    let max = result.store.final_r;
    if i == 0 || i > max {
        return Err(SolveError::StageOutOfRange { stage: i, max });
    }
    let pairs = result.matching.pairs().filter(|&(a, p)| {
        let e = inst.edge_between(a, p).expect("matched pairs are edges");
        inst.edge(e).expect("live").rank <= i && result.store.edge(e).alive_at(i)
    });
    Ok(Matching::from_pairs(pairs).expect("subset of a matching"))
}

/// Labels of the reduced graph of stage `i`.
pub fn stage_labels(result: &SolveResult, inst: &Instance, i: u32) -> Result<EouLabeling, SolveError> {
    let g = reconstruct_reduced_graph(inst, &result.store, i)?;
    let m = stage_matching(result, inst, i)?;
    Ok(classify_eou(&g, &m))
}

/// Highest rank among the matched pairs, 0 for an empty matching.
pub fn max_used_rank(inst: &Instance, m: &Matching) -> u32 {
    m.pairs().filter_map(|(a, p)| inst.rank_of(a, p)).max().unwrap_or(0)
}
