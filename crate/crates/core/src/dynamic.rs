//! Dynamic maintenance of a rank-maximal matching.
//!
//! An update re-runs the stages from the first rank at which the changed
//! vertex has an edge. Stage graphs before that rank are untouched and come
//! straight from the store. At each later stage the matching is seeded with
//! the previous stage's matching plus the old matching's rank-`i` pairs that
//! still fit, so that at most one augmenting path is needed; the vertices
//! that leave even join `T` and those that return to even after having been
//! blocked join `S`.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::decomposition::{augment, classify_eou, find_augmenting_path, Label, StageGraph};
use crate::instance::{Instance, InstanceError, Side, VertexId};
use crate::matching::{signature_of, Matching, Signature};
use crate::ops::Op;
use crate::solver::{
    admit_stage, final_cleanup, prefix_signature, settle_stage, solve, solve_with_matching, SolveError,
    SolveResult,
};
use crate::store::PreprocessStore;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UpdateError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("neighbor `{0}` listed twice")]
    DuplicateNeighbor(String),
}

/// A deliberate defect for exercising the verifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    SkipPruning { stage: u32 },
}

/// How a stage was dispatched.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StageCase {
    /// The added vertex was free and all of its rank-`i` neighbours were odd.
    AllOdd,
    /// Some neighbour unreachable, none even.
    SomeUnreachable,
    /// Some neighbour even: search from the added vertex.
    SomeEven,
    /// The deleted vertex's partner was odd: search from the partner.
    PartnerOdd,
    PartnerUnreachable,
    PartnerEven,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UpdateReport {
    pub old_signature: Signature,
    pub new_signature: Signature,
    pub stages_touched: u32,
    pub augmentations: u32,
    /// Largest number of augmentations performed at a single stage.
    pub max_stage_augmentations: u32,
    /// Stages whose matching size left the range allowed by the update.
    pub size_bound_violations: Vec<u32>,
    /// Edges not on the updated vertex whose deletion moved earlier.
    pub edges_deleted: usize,
    /// Edges not on the updated vertex whose deletion moved later or vanished.
    pub edges_restored: usize,
    pub cases: Vec<(u32, StageCase)>,
    pub paths: Vec<(u32, Vec<String>)>,
    /// Vertices that were put in `S` at some stage.
    pub restored_vertices: Vec<String>,
}

impl UpdateReport {
    fn unchanged(sig: Signature) -> Self {
        UpdateReport {
            old_signature: sig.clone(),
            new_signature: sig,
            stages_touched: 0,
            augmentations: 0,
            max_stage_augmentations: 0,
            size_bound_violations: Vec::new(),
            edges_deleted: 0,
            edges_restored: 0,
            cases: Vec::new(),
            paths: Vec::new(),
            restored_vertices: Vec::new(),
        }
    }

    fn then(mut self, next: UpdateReport) -> Self {
        self.new_signature = next.new_signature;
        self.stages_touched += next.stages_touched;
        self.augmentations += next.augmentations;
        self.max_stage_augmentations = self.max_stage_augmentations.max(next.max_stage_augmentations);
        self.size_bound_violations.extend(next.size_bound_violations);
        self.edges_deleted += next.edges_deleted;
        self.edges_restored += next.edges_restored;
        self.cases.extend(next.cases);
        self.paths.extend(next.paths);
        self.restored_vertices.extend(next.restored_vertices);
        self
    }
}

enum Mode {
    Attach { v: VertexId, old_edge_slots: usize },
    Detach { partner: Option<(VertexId, u32, Label)> },
}

/// An instance together with its rank-maximal matching and store.
#[derive(Clone, Debug)]
pub struct Engine {
    instance: Instance,
    result: SolveResult,
    fault: Option<Fault>,
}

impl Engine {
    pub fn new(instance: Instance) -> Self {
        let result = solve(&instance);
        Engine { instance, result, fault: None }
    }

    /// Starts from a given rank-maximal matching instead of the solver's.
    pub fn with_matching(instance: Instance, m: &Matching) -> Result<Self, SolveError> {
        let result = solve_with_matching(&instance, m)?;
        Ok(Engine { instance, result, fault: None })
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn result(&self) -> &SolveResult {
        &self.result
    }

    pub fn matching(&self) -> &Matching {
        &self.result.matching
    }

    pub fn signature(&self) -> &Signature {
        &self.result.signature
    }

    pub fn store(&self) -> &PreprocessStore {
        &self.result.store
    }

    pub fn set_fault(&mut self, fault: Option<Fault>) {
        self.fault = fault;
    }

    pub fn apply(&mut self, op: &Op) -> Result<UpdateReport, UpdateError> {
        match op {
            Op::AddVertex { name, side, neighbors } => {
                let ns: Vec<(&str, u32)> = neighbors.iter().map(|(n, r)| (n.as_str(), *r)).collect();
                self.add_vertex(name, *side, &ns)
            }
            Op::DeleteVertex { name } => self.delete_vertex(name),
            Op::AddEdge { applicant, post, rank } => self.add_edge(applicant, post, *rank),
            Op::DeleteEdge { applicant, post } => self.delete_edge(applicant, post),
        }
    }

    pub fn add_vertex(&mut self, name: &str, side: Side, neighbors: &[(&str, u32)]) -> Result<UpdateReport, UpdateError> {
        if !crate::instance::is_valid_name(name) {
            return Err(InstanceError::InvalidName(name.to_string()).into());
        }
        if self.instance.lookup(name).is_some() {
            return Err(InstanceError::DuplicateName(name.to_string()).into());
        }
        let edges = self.resolve_neighbors(side, neighbors)?;
        let v = self.instance.add_vertex(side, name)?;
        self.result.store.fit(&self.instance);
        Ok(self.attach(v, &edges))
    }

    pub fn delete_vertex(&mut self, name: &str) -> Result<UpdateReport, UpdateError> {
        let v = self.instance.lookup(name).ok_or_else(|| InstanceError::UnknownVertex(name.to_string()))?;
        let report = self.detach(v);
        self.instance.remove_vertex(v)?;
        self.result.store.set_vertex(v, Default::default());
        Ok(report)
    }

    pub fn add_edge(&mut self, applicant: &str, post: &str, rank: u32) -> Result<UpdateReport, UpdateError> {
        if rank == 0 {
            return Err(InstanceError::InvalidRank(rank).into());
        }
        let a = self.instance.lookup_side(applicant, Side::Applicant)?;
        let p = self.instance.lookup_side(post, Side::Post)?;
        if self.instance.edge_between(a.index, p.index).is_some() {
            return Err(InstanceError::DuplicateEdge { applicant: applicant.into(), post: post.into() }.into());
        }
        let mut edges = self.edges_of(a);
        edges.push((p, rank));
        Ok(self.rebuild_vertex(a, &edges))
    }

    pub fn delete_edge(&mut self, applicant: &str, post: &str) -> Result<UpdateReport, UpdateError> {
        let a = self.instance.lookup_side(applicant, Side::Applicant)?;
        let p = self.instance.lookup_side(post, Side::Post)?;
        if self.instance.edge_between(a.index, p.index).is_none() {
            return Err(InstanceError::UnknownEdge { applicant: applicant.into(), post: post.into() }.into());
        }
        let edges: Vec<(VertexId, u32)> = self.edges_of(a).into_iter().filter(|&(q, _)| q != p).collect();
        Ok(self.rebuild_vertex(a, &edges))
    }

    /// Removes every edge of `v` and adds `edges` back, keeping the slot.
    fn rebuild_vertex(&mut self, v: VertexId, edges: &[(VertexId, u32)]) -> UpdateReport {
        let first = self.detach(v);
        let second = self.attach(v, edges);
        first.then(second)
    }

    fn edges_of(&self, v: VertexId) -> Vec<(VertexId, u32)> {
        self.instance
            .incident(v)
            .iter()
            .map(|&e| {
                let edge = self.instance.edge(e).expect("live");
                (edge.other(v), edge.rank)
            })
            .collect()
    }

    fn resolve_neighbors(&self, side: Side, neighbors: &[(&str, u32)]) -> Result<Vec<(VertexId, u32)>, UpdateError> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::with_capacity(neighbors.len());
        for &(n, r) in neighbors {
            if r == 0 {
                return Err(InstanceError::InvalidRank(r).into());
            }
            let u = self.instance.lookup_side(n, side.opposite())?;
            if !seen.insert(u) {
                return Err(UpdateError::DuplicateNeighbor(n.to_string()));
            }
            out.push((u, r));
        }
        Ok(out)
    }

    /// Old matching sizes per stage, `sizes[i]` for `i` up to `upto`.
    fn stage_sizes(&self, upto: u32) -> Vec<usize> {
        let mut per_rank = vec![0usize; upto as usize + 1];
        for (a, p) in self.result.matching.pairs() {
            let r = self.instance.rank_of(a, p).expect("matched pairs are edges") as usize;
            if r <= upto as usize {
                per_rank[r] += 1;
            }
        }
        let mut acc = 0;
        per_rank.iter().map(|c| {
            acc += c;
            acc
        })
        .collect()
    }

    fn attach(&mut self, v: VertexId, edges: &[(VertexId, u32)]) -> UpdateReport {
        let old_sig = self.result.signature.clone();
        let Some(k) = edges.iter().map(|&(_, r)| r).min() else {
            return UpdateReport::unchanged(old_sig);
        };
        let upto = self.instance.max_rank().max(edges.iter().map(|&(_, r)| r).max().unwrap_or(0));
        let old_sizes = self.stage_sizes(upto);
        let old_edge_slots = self.instance.edge_slots();
        for &(u, r) in edges {
            let (a, p) = match v.side {
                Side::Applicant => (v.index, u.index),
                Side::Post => (u.index, v.index),
            };
            self.instance.add_edge(a, p, r).expect("validated by the caller");
        }
        self.result.store.fit(&self.instance);
        self.restage(k, Mode::Attach { v, old_edge_slots }, old_sizes, old_sig)
    }

    fn detach(&mut self, v: VertexId) -> UpdateReport {
        let old_sig = self.result.signature.clone();
        let Some(k) = self.edges_of(v).iter().map(|&(_, r)| r).min() else {
            return UpdateReport::unchanged(old_sig);
        };
        let old_sizes = self.stage_sizes(self.instance.max_rank());
        let partner = self.result.matching.mate(v).map(|p| {
            let (a, q) = match v.side {
                Side::Applicant => (v.index, p.index),
                Side::Post => (p.index, v.index),
            };
            let j = self.instance.rank_of(a, q).expect("matched pairs are edges");
            (p, j, self.old_label(j, p, usize::MAX))
        });
        self.result.matching.unmatch(v);
        for (e, _) in self.instance.detach(v) {
            self.result.store.set_edge(e, Default::default());
        }
        self.restage(k, Mode::Detach { partner }, old_sizes, old_sig)
    }

    /// Label of `u` in the current store's reduced graph of stage `i`,
    /// ignoring edges with id at least `edge_limit`.
    fn old_label(&self, i: u32, u: VertexId, edge_limit: usize) -> Label {
        old_labels(&self.instance, &self.result.store, &self.result.matching, i, edge_limit).get(u)
    }

    fn restage(&mut self, k: u32, mode: Mode, old_sizes: Vec<usize>, old_sig: Signature) -> UpdateReport {
        let inst = &self.instance;
        let old_store = std::mem::take(&mut self.result.store);
        let old_matching = std::mem::take(&mut self.result.matching);
        let new_r = inst.max_rank();
        let start = k.min(new_r + 1);

        let mut store = old_store.clone();
        store.fit(inst);
        store.reset_from(start);
        let mut m = Matching::from_pairs(
            old_matching.pairs().filter(|&(a, p)| inst.rank_of(a, p).is_some_and(|r| r < start)),
        )
        .expect("subset of a matching");
        while (store.per_stage_signature.len() as u32) < start - 1 {
            let i = store.per_stage_signature.len() as u32 + 1;
            store.per_stage_signature.push(prefix_signature(inst, &m, i));
        }

        let by_rank = inst.edges_by_rank();
        let mut report = UpdateReport::unchanged(old_sig);
        let mut s_set = Marks::new(inst);
        let mut t_set = Marks::new(inst);
        let mut ever_s = Marks::new(inst);
        let old_size = |i: u32| old_sizes.get(i as usize).or(old_sizes.last()).copied().unwrap_or(0);

        for i in start..=new_r {
            let mut g = admit_stage(inst, &mut store, i, &by_rank[i as usize]);
            for &e in &by_rank[i as usize] {
                let edge = inst.edge(e).expect("live");
                let (a, p) = (VertexId::applicant(edge.applicant), VertexId::post(edge.post));
                if old_matching.contains(edge.applicant, edge.post)
                    && g.contains(e)
                    && !m.is_matched(a)
                    && !m.is_matched(p)
                {
                    m.insert(edge.applicant, edge.post).expect("both free");
                }
            }
            let seeded = m.len();

            let root = match mode {
                Mode::Attach { v, old_edge_slots } if !m.is_matched(v) => {
                    let nbrs: Vec<VertexId> = g
                        .neighbors(v)
                        .filter(|&(_, e)| inst.edge(e).expect("live").rank == i)
                        .map(|(u, _)| u)
                        .collect();
                    if nbrs.is_empty() {
                        None
                    } else {
                        let labels = old_labels(inst, &old_store, &old_matching, i, old_edge_slots);
                        let ls: Vec<Label> = nbrs.iter().map(|&u| labels.get(u)).collect();
                        let case = if ls.contains(&Label::Even) {
                            StageCase::SomeEven
                        } else if ls.contains(&Label::Unreachable) {
                            StageCase::SomeUnreachable
                        } else {
                            StageCase::AllOdd
                        };
                        report.cases.push((i, case));
                        (case == StageCase::SomeEven).then_some(v)
                    }
                }
                Mode::Detach { partner: Some((p, j, label)) } if j == i => {
                    let case = match label {
                        Label::Odd => StageCase::PartnerOdd,
                        Label::Unreachable => StageCase::PartnerUnreachable,
                        Label::Even => StageCase::PartnerEven,
                    };
                    report.cases.push((i, case));
                    (case == StageCase::PartnerOdd && !m.is_matched(p)).then_some(p)
                }
                _ => None,
            };
            if let Some(root) = root {
                if let Some(path) = find_augmenting_path(&g, &m, Some(&[root])).expect("root is free") {
                    augment(&mut m, &path).expect("search returns augmenting paths");
                    report.paths.push((i, path.names(inst)));
                }
            }
            while let Some(path) = find_augmenting_path(&g, &m, None).expect("no roots given") {
                augment(&mut m, &path).expect("search returns augmenting paths");
                report.paths.push((i, path.names(inst)));
            }

            let augs = (m.len() - seeded) as u32;
            report.augmentations += augs;
            report.max_stage_augmentations = report.max_stage_augmentations.max(augs);
            let (lo, hi) = match mode {
                Mode::Attach { .. } => (old_size(i), old_size(i) + 1),
                Mode::Detach { .. } => (old_size(i).saturating_sub(1), old_size(i)),
            };
            if m.len() < lo || m.len() > hi {
                report.size_bound_violations.push(i);
            }

            let prune = self.fault != Some(Fault::SkipPruning { stage: i });
            let labels = settle_stage(inst, &mut store, &mut g, &m, i, prune);
            store.per_stage_signature.push(prefix_signature(inst, &m, i));
            report.stages_touched += 1;

            for u in inst.vertices() {
                match labels.get(u) {
                    Label::Odd | Label::Unreachable => {
                        t_set.set(u, true);
                        s_set.set(u, false);
                    }
                    Label::Even => {
                        if !t_set.get(u) && old_store.vertex(u).became_at().is_some_and(|s| s <= i) {
                            s_set.set(u, true);
                            ever_s.set(u, true);
                        }
                    }
                }
            }
        }
        final_cleanup(inst, &mut store, &m, new_r);
        store.per_stage_signature.truncate(new_r as usize);
        store.final_r = new_r;

        for (e, _) in inst.edges() {
            let (before, after) = (old_store.edge(e), store.edge(e));
            if let Mode::Attach { old_edge_slots, .. } = mode {
                if e.0 >= old_edge_slots {
                    continue;
                }
            }
            let at = |d: Option<u32>| d.unwrap_or(u32::MAX);
            match at(after.deleted_at()).cmp(&at(before.deleted_at())) {
                std::cmp::Ordering::Less => report.edges_deleted += 1,
                std::cmp::Ordering::Greater => report.edges_restored += 1,
                std::cmp::Ordering::Equal => {}
            }
        }
        report.restored_vertices = inst.vertices().filter(|&u| ever_s.get(u)).map(|u| inst.name(u).to_string()).collect();

        let signature = signature_of(inst, &m).expect("matching stays inside the instance");
        report.new_signature = signature.clone();
        self.result = SolveResult { matching: m, store, signature };
        report
    }
}

/// A set of vertices as one flag per slot.
struct Marks {
    applicants: Vec<bool>,
    posts: Vec<bool>,
}

impl Marks {
    fn new(inst: &Instance) -> Self {
        Marks { applicants: vec![false; inst.applicant_slots()], posts: vec![false; inst.post_slots()] }
    }

    fn slot(&mut self, v: VertexId) -> &mut bool {
        match v.side {
            Side::Applicant => &mut self.applicants[v.index],
            Side::Post => &mut self.posts[v.index],
        }
    }

    fn get(&self, v: VertexId) -> bool {
        match v.side {
            Side::Applicant => self.applicants[v.index],
            Side::Post => self.posts[v.index],
        }
    }

    fn set(&mut self, v: VertexId, on: bool) {
        *self.slot(v) = on;
    }
}

fn old_labels(inst: &Instance, store: &PreprocessStore, matching: &Matching, i: u32, edge_limit: usize) -> crate::decomposition::EouLabeling {
    let g = StageGraph::from_filter(inst, i, |e| {
        e.0 < edge_limit && inst.edge(e).expect("live").rank <= i && store.edge(e).alive_at(i)
    });
    let m = Matching::from_pairs(matching.pairs().filter(|&(a, p)| {
        inst.edge_between(a, p).is_some_and(|e| e.0 < edge_limit && inst.edge(e).expect("live").rank <= i)
    }))
    .expect("subset of a matching");
    classify_eou(&g, &m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_instance;
    use crate::solver::solve;

    fn same_as_fresh(engine: &Engine) {
        let fresh = solve(engine.instance());
        assert_eq!(engine.signature(), &fresh.signature);
        assert_eq!(
            engine.store().live_view(engine.instance()),
            fresh.store.live_view(engine.instance())
        );
        assert_eq!(engine.store().per_stage_signature(), fresh.store.per_stage_signature());
    }

    #[test]
    fn add_and_remove_isolated_pair() {
        let mut e = Engine::new(parse_instance("a1 : p1").unwrap());
        e.add_vertex("a2", Side::Applicant, &[]).unwrap();
        e.add_vertex("p2", Side::Post, &[]).unwrap();
        let r = e.add_edge("a2", "p2", 2).unwrap();
        assert_eq!(r.new_signature, Signature::new(vec![1, 1]));
        same_as_fresh(&e);
        let r = e.delete_edge("a2", "p2").unwrap();
        assert_eq!(r.new_signature, Signature::new(vec![1]));
        same_as_fresh(&e);
    }

    #[test]
    fn errors_leave_state_untouched() {
        let mut e = Engine::new(parse_instance("a1 : p1").unwrap());
        let before = e.result().clone();
        assert!(e.add_vertex("a1", Side::Applicant, &[]).is_err());
        assert!(e.add_vertex("a2", Side::Applicant, &[("zz", 1)]).is_err());
        assert!(e.add_vertex("a2", Side::Applicant, &[("a1", 1)]).is_err());
        assert!(e.add_vertex("a2", Side::Applicant, &[("p1", 1), ("p1", 2)]).is_err());
        assert!(e.add_vertex("a2", Side::Applicant, &[("p1", 0)]).is_err());
        assert!(e.add_edge("a1", "p1", 1).is_err());
        assert!(e.delete_edge("a1", "p2").is_err());
        assert!(e.delete_vertex("nobody").is_err());
        assert_eq!(e.result(), &before);
        assert!(e.instance().lookup("a2").is_none());
    }

    #[test]
    fn deleting_a_matched_vertex_frees_its_partner() {
        let mut e = Engine::new(parse_instance("a1 : p1\na2 : p1,p2").unwrap());
        let r = e.delete_vertex("a1").unwrap();
        assert_eq!(r.new_signature, Signature::new(vec![1]));
        same_as_fresh(&e);
    }

    #[test]
    fn adding_a_post_mirrors_roles() {
        let mut e = Engine::new(parse_instance("a1 : p1\na2 : p1").unwrap());
        e.add_vertex("p2", Side::Post, &[("a2", 1), ("a1", 2)]).unwrap();
        assert_eq!(e.signature(), &Signature::new(vec![2]));
        same_as_fresh(&e);
    }
}
