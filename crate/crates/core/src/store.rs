//! Per-vertex and per-edge stage records kept by the solver.
//!
//! Text form, one record per line:
//!
//! ```text
//! V <name> <stage|inf> <O|U|->
//! E <applicant> <post> <rank> <deleted_at|inf> <higher-rank|odd-odd|final-cleanup|->
//! ```

use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::format::{content_lines, ParseError, ParseErrorKind};
use crate::instance::{EdgeId, Instance, Side, VertexId};
use crate::matching::{Matching, Signature};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum VertexKind {
    Odd,
    Unreachable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum DeletionCause {
    /// A higher-rank edge on a vertex that was already odd or unreachable.
    HigherRankOnOddOrUnreachable,
    /// An odd–odd or odd–unreachable edge of a stage graph.
    OddOdd,
    FinalCleanup,
}

impl DeletionCause {
    fn token(self) -> &'static str {
        match self {
            DeletionCause::HigherRankOnOddOrUnreachable => "higher-rank",
            DeletionCause::OddOdd => "odd-odd",
            DeletionCause::FinalCleanup => "final-cleanup",
        }
    }

    fn from_token(s: &str) -> Option<Self> {
        match s {
            "higher-rank" => Some(DeletionCause::HigherRankOnOddOrUnreachable),
            "odd-odd" => Some(DeletionCause::OddOdd),
            "final-cleanup" => Some(DeletionCause::FinalCleanup),
            _ => None,
        }
    }
}

/// The first stage at which a vertex stopped being even; `None` means it
/// stayed even through the final stage.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VertexStageRecord {
    pub became: Option<(u32, VertexKind)>,
}

impl VertexStageRecord {
    pub fn at(stage: u32, kind: VertexKind) -> Self {
        VertexStageRecord { became: Some((stage, kind)) }
    }

    pub fn became_at(&self) -> Option<u32> {
        self.became.map(|(s, _)| s)
    }

    pub fn kind(&self) -> Option<VertexKind> {
        self.became.map(|(_, k)| k)
    }

    /// Stage at which the vertex was blocked, if that is before `stage`.
    pub fn blocked_before(&self, stage: u32) -> Option<u32> {
        self.became_at().filter(|&s| s < stage)
    }
}

/// The stage after which an edge no longer belongs to the reduced graphs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EdgeStageRecord {
    pub deleted: Option<(u32, DeletionCause)>,
}

impl EdgeStageRecord {
    pub fn at(stage: u32, cause: DeletionCause) -> Self {
        EdgeStageRecord { deleted: Some((stage, cause)) }
    }

    pub fn deleted_at(&self) -> Option<u32> {
        self.deleted.map(|(s, _)| s)
    }

    pub fn cause(&self) -> Option<DeletionCause> {
        self.deleted.map(|(_, c)| c)
    }

    /// Whether the edge is still present in the reduced graph of `stage`.
    pub fn alive_at(&self, stage: u32) -> bool {
        self.deleted_at().is_none_or(|d| d > stage)
    }
}

/// Records of live vertices and edges, in slot order.
pub type LiveView = (Vec<(VertexId, VertexStageRecord)>, Vec<(EdgeId, EdgeStageRecord)>);

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PreprocessStore {
    applicants: Vec<VertexStageRecord>,
    posts: Vec<VertexStageRecord>,
    edges: Vec<EdgeStageRecord>,
    pub(crate) per_stage_signature: Vec<Signature>,
    pub(crate) final_r: u32,
}

impl PreprocessStore {
    pub fn for_instance(inst: &Instance) -> Self {
        let mut s = PreprocessStore::default();
        s.fit(inst);
        s
    }

    /// Grows the record tables to the instance's slot counts.
    pub fn fit(&mut self, inst: &Instance) {
        self.applicants.resize(inst.applicant_slots().max(self.applicants.len()), Default::default());
        self.posts.resize(inst.post_slots().max(self.posts.len()), Default::default());
        self.edges.resize(inst.edge_slots().max(self.edges.len()), Default::default());
    }

    pub fn vertex(&self, v: VertexId) -> VertexStageRecord {
        let table = match v.side {
            Side::Applicant => &self.applicants,
            Side::Post => &self.posts,
        };
        table.get(v.index).copied().unwrap_or_default()
    }

    pub fn set_vertex(&mut self, v: VertexId, rec: VertexStageRecord) {
        let table = match v.side {
            Side::Applicant => &mut self.applicants,
            Side::Post => &mut self.posts,
        };
        if table.len() <= v.index {
            table.resize(v.index + 1, Default::default());
        }
        table[v.index] = rec;
    }

    pub fn edge(&self, e: EdgeId) -> EdgeStageRecord {
        self.edges.get(e.0).copied().unwrap_or_default()
    }

    pub fn set_edge(&mut self, e: EdgeId, rec: EdgeStageRecord) {
        if self.edges.len() <= e.0 {
            self.edges.resize(e.0 + 1, Default::default());
        }
        self.edges[e.0] = rec;
    }

    pub fn per_stage_signature(&self) -> &[Signature] {
        &self.per_stage_signature
    }

    pub fn final_r(&self) -> u32 {
        self.final_r
    }

    /// Forgets every record set at `stage` or later.
    pub(crate) fn reset_from(&mut self, stage: u32) {
        for rec in self.applicants.iter_mut().chain(self.posts.iter_mut()) {
            if rec.became_at().is_some_and(|s| s >= stage) {
                *rec = Default::default();
            }
        }
        for rec in &mut self.edges {
            if rec.deleted_at().is_some_and(|s| s >= stage) {
                *rec = Default::default();
            }
        }
        self.per_stage_signature.truncate(stage.saturating_sub(1) as usize);
    }

    /// Records restricted to live vertices and edges, for comparing stores
    /// that may differ in dead slots.
    pub fn live_view(&self, inst: &Instance) -> LiveView {
        let vs = inst.vertices().map(|v| (v, self.vertex(v))).collect();
        let es = inst.edges().map(|(id, _)| (id, self.edge(id))).collect();
        (vs, es)
    }
}

fn stage_token(s: Option<u32>) -> String {
    s.map_or_else(|| "inf".to_string(), |s| s.to_string())
}

impl fmt::Display for VertexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VertexKind::Odd => "O",
            VertexKind::Unreachable => "U",
        })
    }
}

/// Serializes the live records of `store`.
pub fn write_store(inst: &Instance, store: &PreprocessStore) -> String {
    let mut out = String::new();
    for v in inst.vertices() {
        let rec = store.vertex(v);
        let kind = rec.kind().map_or_else(|| "-".to_string(), |k| k.to_string());
        let _ = writeln!(out, "V {} {} {}", inst.name(v), stage_token(rec.became_at()), kind);
    }
    for (id, e) in inst.edges() {
        let rec = store.edge(id);
        let _ = writeln!(
            out,
            "E {} {} {} {} {}",
            inst.name(VertexId::applicant(e.applicant)),
            inst.name(VertexId::post(e.post)),
            e.rank,
            stage_token(rec.deleted_at()),
            rec.cause().map_or("-", DeletionCause::token)
        );
    }
    out
}

/// Parses the store format against `inst`; prefix signatures are rebuilt
/// from `matching`.
pub fn parse_store(inst: &Instance, matching: &Matching, text: &str) -> Result<PreprocessStore, ParseError> {
    let bad = |line: usize, s: &str| ParseError { line, kind: ParseErrorKind::BadField(s.to_string()) };
    let stage = |line: usize, s: &str| -> Result<Option<u32>, ParseError> {
        if s == "inf" {
            Ok(None)
        } else {
            s.parse::<u32>().map(Some).map_err(|_| bad(line, s))
        }
    };
    let mut store = PreprocessStore::for_instance(inst);
    for (line, content) in content_lines(text) {
        let fields: Vec<&str> = content.split_whitespace().collect();
        match fields.as_slice() {
            ["V", name, at, kind] => {
                let v = inst.lookup(name).ok_or_else(|| ParseError {
                    line,
                    kind: ParseErrorKind::UnknownVertex(name.to_string()),
                })?;
                let became = match (stage(line, at)?, *kind) {
                    (None, "-") => None,
                    (Some(s), "O") => Some((s, VertexKind::Odd)),
                    (Some(s), "U") => Some((s, VertexKind::Unreachable)),
                    _ => return Err(bad(line, kind)),
                };
                store.set_vertex(v, VertexStageRecord { became });
            }
            ["E", a, p, rank, at, cause] => {
                let unknown = |n: &str| ParseError { line, kind: ParseErrorKind::UnknownVertex(n.to_string()) };
                let av = inst.lookup_side(a, Side::Applicant).map_err(|_| unknown(a))?;
                let pv = inst.lookup_side(p, Side::Post).map_err(|_| unknown(p))?;
                let id = inst.edge_between(av.index, pv.index).ok_or_else(|| ParseError {
                    line,
                    kind: ParseErrorKind::NotAnEdge(a.to_string(), p.to_string()),
                })?;
                let r: u32 = rank.parse().map_err(|_| ParseError {
                    line,
                    kind: ParseErrorKind::BadRank(rank.to_string()),
                })?;
                let actual = inst.edge(id).expect("live").rank;
                if r != actual {
                    return Err(ParseError { line, kind: ParseErrorKind::RankMismatch { expected: actual, found: r } });
                }
                let deleted = match (stage(line, at)?, *cause) {
                    (None, "-") => None,
                    (Some(s), c) => Some((s, DeletionCause::from_token(c).ok_or_else(|| bad(line, c))?)),
                    _ => return Err(bad(line, cause)),
                };
                store.set_edge(id, EdgeStageRecord { deleted });
            }
            _ => return Err(bad(line, content)),
        }
    }
    store.final_r = inst.max_rank();
    store.per_stage_signature = (1..=store.final_r).map(|i| crate::solver::prefix_signature(inst, matching, i)).collect();
    Ok(store)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reset_keeps_earlier_records() {
        let mut s = PreprocessStore::default();
        s.set_vertex(VertexId::applicant(0), VertexStageRecord::at(1, VertexKind::Odd));
        s.set_vertex(VertexId::post(0), VertexStageRecord::at(2, VertexKind::Unreachable));
        s.set_edge(EdgeId(0), EdgeStageRecord::at(1, DeletionCause::OddOdd));
        s.set_edge(EdgeId(1), EdgeStageRecord::at(3, DeletionCause::FinalCleanup));
        s.per_stage_signature = vec![Signature::new(vec![1]), Signature::new(vec![1, 1])];
        s.reset_from(2);
        assert_eq!(s.vertex(VertexId::applicant(0)).became_at(), Some(1));
        assert_eq!(s.vertex(VertexId::post(0)).became_at(), None);
        assert_eq!(s.edge(EdgeId(0)).deleted_at(), Some(1));
        assert_eq!(s.edge(EdgeId(1)).deleted_at(), None);
        assert_eq!(s.per_stage_signature.len(), 1);
    }

    #[test]
    fn alive_at_is_strict() {
        let rec = EdgeStageRecord::at(2, DeletionCause::OddOdd);
        assert!(rec.alive_at(1));
        assert!(!rec.alive_at(2));
        assert!(EdgeStageRecord::default().alive_at(u32::MAX));
    }
}
