//! Exhaustive search for the maximum signature on small instances.
//!
//! Applicants are visited in index order; each is either matched to one of
//! its free posts or skipped. No pruning is applied.

use thiserror::Error;

use crate::instance::{Instance, VertexId};
use crate::matching::{signature_of, Matching, MatchingError, Signature};

pub const DEFAULT_LIMIT: usize = 14;
pub const WITNESS_CAP: usize = 1000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance has {n} vertices, above the oracle limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error(transparent)]
    Matching(#[from] MatchingError),
}

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub best_signature: Signature,
    /// Matchings attaining the best signature, at most [`WITNESS_CAP`].
    pub witnesses: Vec<Matching>,
    pub witness_cap_hit: bool,
    /// Number of matchings examined.
    pub search_space: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    RankMaximal,
    /// A strictly better signature exists.
    Improvable(Signature),
}

struct Search<'a> {
    inst: &'a Instance,
    applicants: Vec<usize>,
    counts: Vec<u32>,
    post_used: Vec<bool>,
    current: Vec<(usize, usize)>,
    best: Option<Signature>,
    witnesses: Vec<Matching>,
    cap_hit: bool,
    leaves: u64,
}

impl Search<'_> {
    fn go(&mut self, k: usize) {
        if k == self.applicants.len() {
            self.leaves += 1;
            let sig = Signature::new(self.counts.clone());
            match self.best.as_ref().map(|b| sig.cmp(b)) {
                Some(std::cmp::Ordering::Less) => return,
                Some(std::cmp::Ordering::Equal) => {}
                _ => {
                    self.best = Some(sig);
                    self.witnesses.clear();
                    self.cap_hit = false;
                }
            }
            if self.witnesses.len() < WITNESS_CAP {
                self.witnesses.push(Matching::from_pairs(self.current.iter().copied()).expect("disjoint"));
            } else {
                self.cap_hit = true;
            }
            return;
        }
        let a = self.applicants[k];
        for &e in self.inst.incident(VertexId::applicant(a)) {
            let edge = *self.inst.edge(e).expect("live");
            if self.post_used[edge.post] {
                continue;
            }
            self.post_used[edge.post] = true;
            self.counts[edge.rank as usize - 1] += 1;
            self.current.push((a, edge.post));
            self.go(k + 1);
            self.current.pop();
            self.counts[edge.rank as usize - 1] -= 1;
            self.post_used[edge.post] = false;
        }
        self.go(k + 1);
    }
}

/// Enumerates every matching of `inst`. Refuses instances with more than
/// `limit` vertices.
pub fn brute_force_signature(inst: &Instance, limit: usize) -> Result<OracleResult, OracleError> {
    let n = inst.num_vertices();
    if n > limit {
        return Err(OracleError::TooLarge { n, limit });
    }
    let mut s = Search {
        inst,
        applicants: inst.applicants().map(|v| v.index).collect(),
        counts: vec![0; inst.max_rank() as usize],
        post_used: vec![false; inst.post_slots()],
        current: Vec::new(),
        best: None,
        witnesses: Vec::new(),
        cap_hit: false,
        leaves: 0,
    };
    s.go(0);
    Ok(OracleResult {
        best_signature: s.best.unwrap_or_default(),
        witnesses: s.witnesses,
        witness_cap_hit: s.cap_hit,
        search_space: s.leaves,
    })
}

pub fn assert_rank_maximal(inst: &Instance, m: &Matching, limit: usize) -> Result<Certificate, OracleError> {
    let sig = signature_of(inst, m)?;
    let best = brute_force_signature(inst, limit)?.best_signature;
    Ok(if sig == best { Certificate::RankMaximal } else { Certificate::Improvable(best) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_instance;

    #[test]
    fn edgeless_instance() {
        let mut inst = Instance::new();
        inst.add_applicant("a").unwrap();
        let r = brute_force_signature(&inst, DEFAULT_LIMIT).unwrap();
        assert_eq!(r.best_signature, Signature::empty());
        assert_eq!(r.witnesses, vec![Matching::new()]);
        assert_eq!(r.search_space, 1);
    }

    #[test]
    fn one_by_one() {
        let inst = parse_instance("a : p").unwrap();
        let m = Matching::from_pairs([(0, 0)]).unwrap();
        assert_eq!(assert_rank_maximal(&inst, &m, DEFAULT_LIMIT), Ok(Certificate::RankMaximal));
        assert_eq!(
            assert_rank_maximal(&inst, &Matching::new(), DEFAULT_LIMIT),
            Ok(Certificate::Improvable(Signature::new(vec![1])))
        );
    }

    #[test]
    fn refuses_large_instances() {
        let inst = parse_instance("a1 : p1\na2 : p2").unwrap();
        assert_eq!(
            brute_force_signature(&inst, 3).unwrap_err(),
            OracleError::TooLarge { n: 4, limit: 3 }
        );
    }

    #[test]
    fn counts_all_matchings_of_a_complete_graph() {
        // K_{2,2}: empty, four singletons, two perfect matchings.
        let inst = parse_instance("a1 : (p1,p2)\na2 : (p1,p2)").unwrap();
        let r = brute_force_signature(&inst, DEFAULT_LIMIT).unwrap();
        assert_eq!(r.search_space, 7);
        assert_eq!(r.witnesses.len(), 2);
        assert_eq!(r.best_signature, Signature::new(vec![2]));
    }

    #[test]
    fn witness_cap_is_reported() {
        // Seven applicants tied over seven posts: 7! perfect matchings.
        let mut text = String::new();
        for i in 1..=7 {
            text += &format!("a{i} : (p1,p2,p3,p4,p5,p6,p7)\n");
        }
        let inst = parse_instance(&text).unwrap();
        let r = brute_force_signature(&inst, DEFAULT_LIMIT).unwrap();
        assert_eq!(r.witnesses.len(), WITNESS_CAP);
        assert!(r.witness_cap_hit);
    }
}
