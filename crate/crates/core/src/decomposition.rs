//! Maximum-matching kernel on one stage graph.
//!
//! Augmenting paths are found by breadth-first search over alternating
//! paths; vertices are scanned in ascending index order unless a caller asks
//! for [`ScanOrder::Descending`]. The even/odd/unreachable classification is
//! a single multi-source alternating BFS from every unmatched vertex.

use std::collections::VecDeque;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::instance::{EdgeId, Instance, Side, VertexId};
use crate::matching::Matching;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecompositionError {
    #[error("root {0:?} is matched")]
    MatchedRoot(VertexId),
    #[error("path is not augmenting: {0}")]
    NotAugmenting(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Label {
    Even,
    Odd,
    Unreachable,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Even => "E",
            Label::Odd => "O",
            Label::Unreachable => "U",
        })
    }
}

/// Even/odd/unreachable labels for every vertex slot of a stage graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EouLabeling {
    applicants: Vec<Label>,
    posts: Vec<Label>,
}

impl EouLabeling {
    pub fn get(&self, v: VertexId) -> Label {
        match v.side {
            Side::Applicant => self.applicants.get(v.index),
            Side::Post => self.posts.get(v.index),
        }
        .copied()
        .unwrap_or(Label::Even)
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, Label)> + '_ {
        let a = self.applicants.iter().enumerate().map(|(i, &l)| (VertexId::applicant(i), l));
        let p = self.posts.iter().enumerate().map(|(i, &l)| (VertexId::post(i), l));
        a.chain(p)
    }

    pub fn count(&self, label: Label) -> usize {
        self.applicants.iter().chain(&self.posts).filter(|&&l| l == label).count()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ScanOrder {
    #[default]
    Ascending,
    Descending,
}

/// A subgraph of an instance used at one stage (`G_i`, `G'_i`, `H'_i`).
///
/// Adjacency is copied from the instance at construction; removing an edge
/// only clears its bit.
#[derive(Clone, Debug)]
pub struct StageGraph {
    stage: u32,
    applicant_adj: Vec<Vec<(usize, EdgeId)>>,
    post_adj: Vec<Vec<(usize, EdgeId)>>,
    present: Vec<bool>,
    edge_count: usize,
}

impl StageGraph {
    /// Keeps the live edges of `inst` whose id is set in `mask`.
    pub fn from_mask(inst: &Instance, stage: u32, mask: &[bool]) -> Self {
        Self::from_filter(inst, stage, |id| mask.get(id.0).copied().unwrap_or(false))
    }

    pub fn from_filter(inst: &Instance, stage: u32, mut keep: impl FnMut(EdgeId) -> bool) -> Self {
        let mut present = vec![false; inst.edge_slots()];
        let mut edge_count = 0;
        for (id, _) in inst.edges() {
            if keep(id) {
                present[id.0] = true;
                edge_count += 1;
            }
        }
        let adjacency = |v: VertexId| -> Vec<(usize, EdgeId)> {
            inst.incident(v)
                .iter()
                .filter(|e| present[e.0])
                .map(|&e| (inst.edge(e).expect("live").other(v).index, e))
                .collect()
        };
        let applicant_adj = (0..inst.applicant_slots())
            .map(|i| adjacency(VertexId::applicant(i)))
            .collect();
        let post_adj = (0..inst.post_slots()).map(|i| adjacency(VertexId::post(i))).collect();
        StageGraph { stage, applicant_adj, post_adj, present, edge_count }
    }

    pub fn stage(&self) -> u32 {
        self.stage
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.present.get(e.0).copied().unwrap_or(false)
    }

    pub fn remove_edge(&mut self, e: EdgeId) -> bool {
        match self.present.get_mut(e.0) {
            Some(bit) if *bit => {
                *bit = false;
                self.edge_count -= 1;
                true
            }
            _ => false,
        }
    }

    pub fn num_edges(&self) -> usize {
        self.edge_count
    }

    pub fn applicant_slots(&self) -> usize {
        self.applicant_adj.len()
    }

    pub fn post_slots(&self) -> usize {
        self.post_adj.len()
    }

    /// Present edge ids in ascending order.
    pub fn edge_ids(&self) -> Vec<EdgeId> {
        self.present
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| EdgeId(i))
            .collect()
    }

    /// Neighbours of `v` through present edges, by ascending index.
    pub fn neighbors(&self, v: VertexId) -> impl DoubleEndedIterator<Item = (VertexId, EdgeId)> + '_ {
        let (list, other) = match v.side {
            Side::Applicant => (self.applicant_adj.get(v.index), Side::Post),
            Side::Post => (self.post_adj.get(v.index), Side::Applicant),
        };
        list.map_or(&[][..], Vec::as_slice)
            .iter()
            .filter(|(_, e)| self.present[e.0])
            .map(move |&(u, e)| (VertexId { side: other, index: u }, e))
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.neighbors(v).count()
    }

    fn flat(&self, v: VertexId) -> usize {
        match v.side {
            Side::Applicant => v.index,
            Side::Post => self.applicant_adj.len() + v.index,
        }
    }

    fn unflat(&self, i: usize) -> VertexId {
        let na = self.applicant_adj.len();
        if i < na {
            VertexId::applicant(i)
        } else {
            VertexId::post(i - na)
        }
    }

    fn num_slots(&self) -> usize {
        self.applicant_adj.len() + self.post_adj.len()
    }
}

/// An alternating path given by its vertices, from a root to a free vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlternatingPath(pub Vec<VertexId>);

impl AlternatingPath {
    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn names(&self, inst: &Instance) -> Vec<String> {
        self.0.iter().map(|&v| inst.name(v).to_string()).collect()
    }
}

/// Breadth-first search for an augmenting path from `roots` (every free
/// applicant when `None`).
pub fn find_augmenting_path(
    g: &StageGraph,
    m: &Matching,
    roots: Option<&[VertexId]>,
) -> Result<Option<AlternatingPath>, DecompositionError> {
    find_augmenting_path_ordered(g, m, roots, ScanOrder::Ascending)
}

pub fn find_augmenting_path_ordered(
    g: &StageGraph,
    m: &Matching,
    roots: Option<&[VertexId]>,
    order: ScanOrder,
) -> Result<Option<AlternatingPath>, DecompositionError> {
    const NONE: usize = usize::MAX;
    let mut parent = vec![NONE; g.num_slots()];
    let mut visited = vec![false; g.num_slots()];
    let mut queue = VecDeque::new();

    let mut push_root = |v: VertexId, queue: &mut VecDeque<VertexId>| {
        let i = g.flat(v);
        if !visited[i] {
            visited[i] = true;
            queue.push_back(v);
        }
    };
    match roots {
        Some(roots) => {
            for &r in roots {
                if m.is_matched(r) {
                    return Err(DecompositionError::MatchedRoot(r));
                }
                push_root(r, &mut queue);
            }
        }
        None => {
            let free: Vec<VertexId> = (0..g.applicant_slots())
                .map(VertexId::applicant)
                .filter(|&a| !m.is_matched(a) && g.degree(a) > 0)
                .collect();
            let iter: Box<dyn Iterator<Item = &VertexId>> = match order {
                ScanOrder::Ascending => Box::new(free.iter()),
                ScanOrder::Descending => Box::new(free.iter().rev()),
            };
            for &r in iter {
                push_root(r, &mut queue);
            }
        }
    }

    while let Some(u) = queue.pop_front() {
        let mate = m.mate(u);
        let neighbors: Vec<VertexId> = match order {
            ScanOrder::Ascending => g.neighbors(u).map(|(w, _)| w).collect(),
            ScanOrder::Descending => g.neighbors(u).rev().map(|(w, _)| w).collect(),
        };
        for w in neighbors {
            if Some(w) == mate {
                continue;
            }
            let wi = g.flat(w);
            if visited[wi] {
                continue;
            }
            visited[wi] = true;
            parent[wi] = g.flat(u);
            match m.mate(w) {
                None => {
                    let mut path = vec![w];
                    let mut cur = wi;
                    while parent[cur] != NONE {
                        cur = parent[cur];
                        path.push(g.unflat(cur));
                    }
                    path.reverse();
                    return Ok(Some(AlternatingPath(path)));
                }
                Some(x) => {
                    let xi = g.flat(x);
                    if !visited[xi] {
                        visited[xi] = true;
                        parent[xi] = wi;
                        queue.push_back(x);
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Flips the path's edges in `m`, growing it by one pair.
pub fn augment(m: &mut Matching, path: &AlternatingPath) -> Result<(), DecompositionError> {
    let vs = path.vertices();
    if vs.len() < 2 || !vs.len().is_multiple_of(2) {
        return Err(DecompositionError::NotAugmenting("path must have an odd number of edges"));
    }
    if m.is_matched(vs[0]) || m.is_matched(vs[vs.len() - 1]) {
        return Err(DecompositionError::NotAugmenting("endpoints must be free"));
    }
    for (k, w) in vs.windows(2).enumerate() {
        if w[0].side == w[1].side {
            return Err(DecompositionError::NotAugmenting("consecutive vertices on one side"));
        }
        let matched = m.mate(w[0]) == Some(w[1]);
        if matched != (k % 2 == 1) {
            return Err(DecompositionError::NotAugmenting("edges do not alternate"));
        }
    }
    for w in vs.windows(2).skip(1).step_by(2) {
        m.unmatch(w[0]);
    }
    for w in vs.chunks(2) {
        let (a, p) = match w[0].side {
            Side::Applicant => (w[0].index, w[1].index),
            Side::Post => (w[1].index, w[0].index),
        };
        m.insert(a, p).expect("freed above");
    }
    Ok(())
}

/// Augments `m` in place until it is maximum in `g`; returns the number of
/// augmentations.
pub fn maximize(g: &StageGraph, m: &mut Matching, order: ScanOrder) -> usize {
    let mut count = 0;
    // Length-one augmenting paths first.
    let applicants: Vec<usize> = match order {
        ScanOrder::Ascending => (0..g.applicant_slots()).collect(),
        ScanOrder::Descending => (0..g.applicant_slots()).rev().collect(),
    };
    for &a in &applicants {
        let av = VertexId::applicant(a);
        if m.is_matched(av) {
            continue;
        }
        let free_post = match order {
            ScanOrder::Ascending => g.neighbors(av).find(|(p, _)| !m.is_matched(*p)),
            ScanOrder::Descending => g.neighbors(av).rev().find(|(p, _)| !m.is_matched(*p)),
        };
        if let Some((p, _)) = free_post {
            m.insert(a, p.index).expect("both free");
            count += 1;
        }
    }
    while let Some(path) = find_augmenting_path_ordered(g, m, None, order).expect("no roots given") {
        augment(m, &path).expect("search returns augmenting paths");
        count += 1;
    }
    count
}

/// A maximum matching of `g` reached from `seed` by augmentation only.
pub fn maximum_matching(g: &StageGraph, seed: Matching) -> Matching {
    let mut m = seed;
    maximize(g, &mut m, ScanOrder::Ascending);
    m
}

/// Labels every vertex slot as even, odd or unreachable with respect to a
/// maximum matching `m` of `g`.
pub fn classify_eou(g: &StageGraph, m: &Matching) -> EouLabeling {
    let n = g.num_slots();
    let mut label: Vec<Option<Label>> = vec![None; n];
    let mut queue = VecDeque::new();
    for (i, l) in label.iter_mut().enumerate() {
        let v = g.unflat(i);
        if !m.is_matched(v) {
            *l = Some(Label::Even);
            queue.push_back(v);
        }
    }
    while let Some(u) = queue.pop_front() {
        let mate = m.mate(u);
        for (w, _) in g.neighbors(u) {
            if Some(w) == mate {
                continue;
            }
            let wi = g.flat(w);
            if label[wi].is_some() {
                continue;
            }
            label[wi] = Some(Label::Odd);
            if let Some(x) = m.mate(w) {
                let xi = g.flat(x);
                if label[xi].is_none() {
                    label[xi] = Some(Label::Even);
                    queue.push_back(x);
                }
            }
        }
    }
    let na = g.applicant_slots();
    let resolved: Vec<Label> = label.into_iter().map(|l| l.unwrap_or(Label::Unreachable)).collect();
    EouLabeling { applicants: resolved[..na].to_vec(), posts: resolved[na..].to_vec() }
}
