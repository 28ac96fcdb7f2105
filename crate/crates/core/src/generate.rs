//! Seeded random instances and update sequences.
//!
//! An instance with `n` vertices has `ceil(n/2)` applicants `a1..` and
//! `floor(n/2)` posts `p1..`. Its `m` edges are distinct pairs drawn
//! uniformly; each rank is drawn from a geometric distribution with ratio
//! 1/2 truncated to `1..=r`.

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::{index, IteratorRandom};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::instance::{Instance, Side, VertexId};
use crate::ops::Op;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug)]
pub struct GenParams {
    pub n: usize,
    pub m: usize,
    pub r: u32,
    /// Renumber each applicant's ranks to `1..=k` so the instance can be
    /// written as preference lists.
    pub consecutive: bool,
}

fn rank_dist(r: u32) -> WeightedIndex<f64> {
    WeightedIndex::new((0..r.max(1)).map(|k| 0.5f64.powi(k as i32))).expect("positive weights")
}

pub fn random_instance(params: GenParams, rng: &mut impl Rng) -> Instance {
    let na = params.n.div_ceil(2);
    let np = params.n / 2;
    let mut inst = Instance::new();
    for i in 1..=na {
        inst.add_applicant(&format!("a{i}")).expect("fresh name");
    }
    for i in 1..=np {
        inst.add_post(&format!("p{i}")).expect("fresh name");
    }
    let total = na * np;
    let m = params.m.min(total);
    let dist = rank_dist(params.r);
    let mut edges: Vec<(usize, usize, u32)> = index::sample(rng, total.max(1), if total == 0 { 0 } else { m })
        .into_iter()
        .map(|k| (k / np, k % np, dist.sample(rng) as u32 + 1))
        .collect();
    if params.consecutive {
        edges.sort_unstable_by_key(|&(a, _, r)| (a, r));
        let mut i = 0;
        while i < edges.len() {
            let a = edges[i].0;
            let (mut next, mut last) = (0, 0);
            while i < edges.len() && edges[i].0 == a {
                if edges[i].2 != last {
                    last = edges[i].2;
                    next += 1;
                }
                edges[i].2 = next;
                i += 1;
            }
        }
    }
    for (a, p, r) in edges {
        inst.add_edge(a, p, r).expect("distinct pairs");
    }
    inst
}

/// Removes posts without edges, so that the instance can be written.
pub fn drop_isolated_posts(inst: &mut Instance) {
    let isolated: Vec<VertexId> = inst.posts().filter(|&p| inst.incident(p).is_empty()).collect();
    for p in isolated {
        inst.remove_vertex(p).expect("live");
    }
}

/// Draws one valid update for `inst`. New vertices are named `x<k>` from
/// `next_name`; vertex additions stop once `max_vertices` is reached.
pub fn random_op(inst: &Instance, r: u32, max_vertices: usize, next_name: &mut usize, rng: &mut impl Rng) -> Op {
    let dist = rank_dist(r);
    loop {
        match rng.gen_range(0..4) {
            0 if inst.num_vertices() < max_vertices => {
                let side = if rng.gen_bool(0.5) { Side::Applicant } else { Side::Post };
                let others: Vec<VertexId> = match side {
                    Side::Applicant => inst.posts().collect(),
                    Side::Post => inst.applicants().collect(),
                };
                let k = rng.gen_range(0..=others.len().min(3));
                let neighbors = others
                    .into_iter()
                    .choose_multiple(rng, k)
                    .into_iter()
                    .map(|u| (inst.name(u).to_string(), dist.sample(rng) as u32 + 1))
                    .collect();
                *next_name += 1;
                return Op::AddVertex { name: format!("x{next_name}"), side, neighbors };
            }
            1 => {
                if let Some(v) = inst.vertices().choose(rng) {
                    return Op::DeleteVertex { name: inst.name(v).to_string() };
                }
            }
            2 => {
                if let Some((a, p)) = random_non_edge(inst, rng) {
                    return Op::AddEdge {
                        applicant: inst.name(a).to_string(),
                        post: inst.name(p).to_string(),
                        rank: dist.sample(rng) as u32 + 1,
                    };
                }
            }
            3 => {
                if let Some((_, e)) = inst.edges().choose(rng) {
                    return Op::DeleteEdge {
                        applicant: inst.name(VertexId::applicant(e.applicant)).to_string(),
                        post: inst.name(VertexId::post(e.post)).to_string(),
                    };
                }
            }
            _ => {}
        }
        if inst.num_vertices() == 0 && max_vertices == 0 {
            *next_name += 1;
            return Op::AddVertex { name: format!("x{next_name}"), side: Side::Applicant, neighbors: Vec::new() };
        }
    }
}

fn random_non_edge(inst: &Instance, rng: &mut impl Rng) -> Option<(VertexId, VertexId)> {
    let applicants: Vec<VertexId> = inst.applicants().collect();
    let posts: Vec<VertexId> = inst.posts().collect();
    if applicants.is_empty() || posts.is_empty() {
        return None;
    }
    for _ in 0..64 {
        let a = applicants[rng.gen_range(0..applicants.len())];
        let p = posts[rng.gen_range(0..posts.len())];
        if inst.edge_between(a.index, p.index).is_none() {
            return Some((a, p));
        }
    }
    applicants
        .iter()
        .flat_map(|&a| posts.iter().map(move |&p| (a, p)))
        .filter(|&(a, p)| inst.edge_between(a.index, p.index).is_none())
        .choose(rng)
}
