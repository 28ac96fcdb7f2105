//! Applicant–post instances with rank-labelled edges.
//!
//! Vertices live in two dense index spaces, one per side. Deleting a vertex
//! tombstones its slot, so an index is never handed out twice within the
//! lifetime of one [`Instance`]. Edges are addressed by [`EdgeId`] and are
//! tombstoned the same way.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Which side of the bipartition a vertex belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Side {
    Applicant,
    Post,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Applicant => Side::Post,
            Side::Post => Side::Applicant,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Applicant => f.write_str("A"),
            Side::Post => f.write_str("P"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct VertexId {
    pub side: Side,
    pub index: usize,
}

impl VertexId {
    pub const fn applicant(index: usize) -> Self {
        VertexId { side: Side::Applicant, index }
    }

    pub const fn post(index: usize) -> Self {
        VertexId { side: Side::Post, index }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EdgeId(pub usize);

/// An edge `(applicant, post)` carrying the applicant's rank for the post.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RankedEdge {
    pub applicant: usize,
    pub post: usize,
    pub rank: u32,
}

impl RankedEdge {
    /// The endpoint on `side`.
    pub fn endpoint(&self, side: Side) -> VertexId {
        match side {
            Side::Applicant => VertexId::applicant(self.applicant),
            Side::Post => VertexId::post(self.post),
        }
    }

    /// The endpoint opposite to `v`, which must be one of the edge's ends.
    pub fn other(&self, v: VertexId) -> VertexId {
        self.endpoint(v.side.opposite())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("vertex name `{0}` is already in use")]
    DuplicateName(String),
    #[error("invalid vertex name `{0}`")]
    InvalidName(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("vertex `{name}` is not on the {expected:?} side")]
    WrongSide { name: String, expected: Side },
    #[error("edge ({applicant}, {post}) already exists")]
    DuplicateEdge { applicant: String, post: String },
    #[error("no edge between `{applicant}` and `{post}`")]
    UnknownEdge { applicant: String, post: String },
    #[error("rank must be at least 1, got {0}")]
    InvalidRank(u32),
}

#[derive(Clone, Debug)]
struct Slot {
    name: String,
    alive: bool,
}

/// A bipartite instance `A ∪ P` with ranked edges.
#[derive(Clone, Debug, Default)]
pub struct Instance {
    applicants: Vec<Slot>,
    posts: Vec<Slot>,
    edges: Vec<Option<RankedEdge>>,
    // Incident edge lists, kept sorted by the opposite endpoint's index.
    applicant_adj: Vec<Vec<EdgeId>>,
    post_adj: Vec<Vec<EdgeId>>,
    by_name: HashMap<String, VertexId>,
    by_pair: HashMap<(usize, usize), EdgeId>,
    rank_histogram: BTreeMap<u32, usize>,
    live_applicants: usize,
    live_posts: usize,
}

/// Names may not be empty and may not contain whitespace, commas,
/// parentheses or colons, so that they survive the text formats.
pub fn is_valid_name(name: &str) -> bool {
    !name.is_empty()
        && !name
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, ',' | '(' | ')' | ':'))
}

impl Instance {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_applicant(&mut self, name: &str) -> Result<VertexId, InstanceError> {
        self.add_vertex(Side::Applicant, name)
    }

    pub fn add_post(&mut self, name: &str) -> Result<VertexId, InstanceError> {
        self.add_vertex(Side::Post, name)
    }

    pub fn add_vertex(&mut self, side: Side, name: &str) -> Result<VertexId, InstanceError> {
        if !is_valid_name(name) {
            return Err(InstanceError::InvalidName(name.to_string()));
        }
        if self.by_name.contains_key(name) {
            return Err(InstanceError::DuplicateName(name.to_string()));
        }
        let slot = Slot { name: name.to_string(), alive: true };
        let id = match side {
            Side::Applicant => {
                self.applicants.push(slot);
                self.applicant_adj.push(Vec::new());
                self.live_applicants += 1;
                VertexId::applicant(self.applicants.len() - 1)
            }
            Side::Post => {
                self.posts.push(slot);
                self.post_adj.push(Vec::new());
                self.live_posts += 1;
                VertexId::post(self.posts.len() - 1)
            }
        };
        self.by_name.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn add_edge(
        &mut self,
        applicant: usize,
        post: usize,
        rank: u32,
    ) -> Result<EdgeId, InstanceError> {
        if rank == 0 {
            return Err(InstanceError::InvalidRank(rank));
        }
        self.check_alive(VertexId::applicant(applicant))?;
        self.check_alive(VertexId::post(post))?;
        if self.by_pair.contains_key(&(applicant, post)) {
            return Err(InstanceError::DuplicateEdge {
                applicant: self.applicants[applicant].name.clone(),
                post: self.posts[post].name.clone(),
            });
        }
        let id = EdgeId(self.edges.len());
        self.edges.push(Some(RankedEdge { applicant, post, rank }));
        self.by_pair.insert((applicant, post), id);
        *self.rank_histogram.entry(rank).or_default() += 1;

        let edges = &self.edges;
        let list = &mut self.applicant_adj[applicant];
        let at = list.partition_point(|e| edges[e.0].map_or(0, |x| x.post) < post);
        list.insert(at, id);
        let list = &mut self.post_adj[post];
        let at = list.partition_point(|e| edges[e.0].map_or(0, |x| x.applicant) < applicant);
        list.insert(at, id);
        Ok(id)
    }

    /// Adds an edge between two named vertices.
    pub fn add_edge_by_name(
        &mut self,
        applicant: &str,
        post: &str,
        rank: u32,
    ) -> Result<EdgeId, InstanceError> {
        let a = self.lookup_side(applicant, Side::Applicant)?;
        let p = self.lookup_side(post, Side::Post)?;
        self.add_edge(a.index, p.index, rank)
    }

    pub fn remove_edge(&mut self, id: EdgeId) -> Option<RankedEdge> {
        let edge = self.edges.get_mut(id.0)?.take()?;
        self.by_pair.remove(&(edge.applicant, edge.post));
        if let Some(count) = self.rank_histogram.get_mut(&edge.rank) {
            *count -= 1;
            if *count == 0 {
                self.rank_histogram.remove(&edge.rank);
            }
        }
        self.applicant_adj[edge.applicant].retain(|&e| e != id);
        self.post_adj[edge.post].retain(|&e| e != id);
        Some(edge)
    }

    /// Removes every edge incident on `v`, returning them with their ids.
    pub fn detach(&mut self, v: VertexId) -> Vec<(EdgeId, RankedEdge)> {
        let ids: Vec<EdgeId> = self.incident(v).to_vec();
        ids.into_iter()
            .filter_map(|id| self.remove_edge(id).map(|e| (id, e)))
            .collect()
    }

    /// Removes `v` and its edges. The slot stays tombstoned; the name becomes
    /// available again.
    pub fn remove_vertex(&mut self, v: VertexId) -> Result<Vec<(EdgeId, RankedEdge)>, InstanceError> {
        self.check_alive(v)?;
        let removed = self.detach(v);
        let slot = match v.side {
            Side::Applicant => {
                self.live_applicants -= 1;
                &mut self.applicants[v.index]
            }
            Side::Post => {
                self.live_posts -= 1;
                &mut self.posts[v.index]
            }
        };
        slot.alive = false;
        self.by_name.remove(&slot.name);
        Ok(removed)
    }

    fn check_alive(&self, v: VertexId) -> Result<(), InstanceError> {
        if self.is_alive(v) {
            Ok(())
        } else {
            Err(InstanceError::UnknownVertex(format!("{:?}#{}", v.side, v.index)))
        }
    }

    pub fn is_alive(&self, v: VertexId) -> bool {
        self.slots(v.side).get(v.index).is_some_and(|s| s.alive)
    }

    fn slots(&self, side: Side) -> &[Slot] {
        match side {
            Side::Applicant => &self.applicants,
            Side::Post => &self.posts,
        }
    }

    pub fn lookup(&self, name: &str) -> Option<VertexId> {
        self.by_name.get(name).copied()
    }

    /// Looks up `name` and checks that it lies on `side`.
    pub fn lookup_side(&self, name: &str, side: Side) -> Result<VertexId, InstanceError> {
        match self.lookup(name) {
            Some(v) if v.side == side => Ok(v),
            Some(_) => Err(InstanceError::WrongSide { name: name.to_string(), expected: side }),
            None => Err(InstanceError::UnknownVertex(name.to_string())),
        }
    }

    /// Name of a vertex slot; tombstoned slots keep their last name.
    pub fn name(&self, v: VertexId) -> &str {
        &self.slots(v.side)[v.index].name
    }

    pub fn edge(&self, id: EdgeId) -> Option<&RankedEdge> {
        self.edges.get(id.0).and_then(Option::as_ref)
    }

    pub fn edge_between(&self, applicant: usize, post: usize) -> Option<EdgeId> {
        self.by_pair.get(&(applicant, post)).copied()
    }

    pub fn rank_of(&self, applicant: usize, post: usize) -> Option<u32> {
        self.edge_between(applicant, post).and_then(|e| self.edge(e)).map(|e| e.rank)
    }

    /// Live edges incident on `v`, ordered by the opposite endpoint's index.
    pub fn incident(&self, v: VertexId) -> &[EdgeId] {
        let lists = match v.side {
            Side::Applicant => &self.applicant_adj,
            Side::Post => &self.post_adj,
        };
        lists.get(v.index).map_or(&[], Vec::as_slice)
    }

    /// Live edges in id order.
    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, &RankedEdge)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.as_ref().map(|e| (EdgeId(i), e)))
    }

    /// Live vertices: applicants first, then posts, each in index order.
    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.applicants().chain(self.posts())
    }

    pub fn applicants(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.applicants
            .iter()
            .enumerate()
            .filter(|(_, s)| s.alive)
            .map(|(i, _)| VertexId::applicant(i))
    }

    pub fn posts(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.posts
            .iter()
            .enumerate()
            .filter(|(_, s)| s.alive)
            .map(|(i, _)| VertexId::post(i))
    }

    /// Number of applicant slots, tombstones included.
    pub fn applicant_slots(&self) -> usize {
        self.applicants.len()
    }

    pub fn post_slots(&self) -> usize {
        self.posts.len()
    }

    pub fn edge_slots(&self) -> usize {
        self.edges.len()
    }

    pub fn num_applicants(&self) -> usize {
        self.live_applicants
    }

    pub fn num_posts(&self) -> usize {
        self.live_posts
    }

    /// `n = |A| + |P|` over live vertices.
    pub fn num_vertices(&self) -> usize {
        self.live_applicants + self.live_posts
    }

    /// `m`, the number of live edges.
    pub fn num_edges(&self) -> usize {
        self.by_pair.len()
    }

    /// `r`, the largest rank on any edge (0 when edgeless).
    pub fn max_rank(&self) -> u32 {
        self.rank_histogram.keys().next_back().copied().unwrap_or(0)
    }

    /// Live edge ids bucketed by rank; index 0 is unused.
    pub fn edges_by_rank(&self) -> Vec<Vec<EdgeId>> {
        let mut buckets = vec![Vec::new(); self.max_rank() as usize + 1];
        for (id, e) in self.edges() {
            buckets[e.rank as usize].push(id);
        }
        buckets
    }

    /// The named edge triples, used for structural comparison.
    pub fn named_edges(&self) -> BTreeSet<(String, String, u32)> {
        self.edges()
            .map(|(_, e)| {
                (
                    self.applicants[e.applicant].name.clone(),
                    self.posts[e.post].name.clone(),
                    e.rank,
                )
            })
            .collect()
    }

    fn named_side(&self, side: Side) -> BTreeSet<&str> {
        self.slots(side)
            .iter()
            .filter(|s| s.alive)
            .map(|s| s.name.as_str())
            .collect()
    }
}

/// Structural equality on names, edges and ranks; index assignment is ignored.
impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.named_side(Side::Applicant) == other.named_side(Side::Applicant)
            && self.named_side(Side::Post) == other.named_side(Side::Post)
            && self.named_edges() == other.named_edges()
    }
}

impl Eq for Instance {}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Instance {
        let mut inst = Instance::new();
        let a = inst.add_applicant("a").unwrap();
        let b = inst.add_applicant("b").unwrap();
        let p = inst.add_post("p").unwrap();
        let q = inst.add_post("q").unwrap();
        inst.add_edge(a.index, q.index, 2).unwrap();
        inst.add_edge(a.index, p.index, 1).unwrap();
        inst.add_edge(b.index, p.index, 3).unwrap();
        inst
    }

    #[test]
    fn adjacency_is_sorted_by_neighbor_index() {
        let inst = small();
        let posts: Vec<usize> = inst
            .incident(VertexId::applicant(0))
            .iter()
            .map(|&e| inst.edge(e).unwrap().post)
            .collect();
        assert_eq!(posts, vec![0, 1]);
        assert_eq!(inst.max_rank(), 3);
        assert_eq!(inst.num_edges(), 3);
    }

    #[test]
    fn names_are_unique_across_sides() {
        let mut inst = small();
        assert_eq!(
            inst.add_post("a"),
            Err(InstanceError::DuplicateName("a".into()))
        );
        assert!(matches!(inst.add_applicant("x y"), Err(InstanceError::InvalidName(_))));
    }

    #[test]
    fn duplicate_edge_and_zero_rank_are_rejected() {
        let mut inst = small();
        assert!(matches!(inst.add_edge(0, 0, 4), Err(InstanceError::DuplicateEdge { .. })));
        assert_eq!(inst.add_edge(1, 1, 0), Err(InstanceError::InvalidRank(0)));
    }

    #[test]
    fn removed_vertices_are_tombstoned() {
        let mut inst = small();
        let removed = inst.remove_vertex(VertexId::post(0)).unwrap();
        assert_eq!(removed.len(), 2);
        assert_eq!(inst.max_rank(), 2);
        assert_eq!(inst.num_posts(), 1);
        let p2 = inst.add_post("p").unwrap();
        assert_eq!(p2.index, 2, "slot indices are not reused");
        assert!(!inst.is_alive(VertexId::post(0)));
    }

    #[test]
    fn equality_ignores_index_assignment() {
        let mut other = Instance::new();
        other.add_post("q").unwrap();
        other.add_post("p").unwrap();
        other.add_applicant("b").unwrap();
        other.add_applicant("a").unwrap();
        other.add_edge_by_name("b", "p", 3).unwrap();
        other.add_edge_by_name("a", "p", 1).unwrap();
        other.add_edge_by_name("a", "q", 2).unwrap();
        assert_eq!(small(), other);
        other.add_edge_by_name("b", "q", 1).unwrap();
        assert_ne!(small(), other);
    }
}
