//! Matchings, signatures and the signature order.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::instance::{Instance, Side, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatchingError {
    #[error("vertex {0:?} is already matched")]
    AlreadyMatched(VertexId),
    #[error("invalid matching: {0}")]
    Invalid(ValidationReport),
}

/// A set of vertex-disjoint applicant–post pairs, stored as mate arrays.
#[derive(Clone, Debug, Default)]
pub struct Matching {
    applicant_mate: Vec<Option<usize>>,
    post_mate: Vec<Option<usize>>,
    len: usize,
}

impl Matching {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a matching from pairs, failing on the first shared vertex.
    pub fn from_pairs<I>(pairs: I) -> Result<Self, MatchingError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut m = Matching::new();
        for (a, p) in pairs {
            m.insert(a, p)?;
        }
        Ok(m)
    }

    pub fn insert(&mut self, applicant: usize, post: usize) -> Result<(), MatchingError> {
        if self.applicant_mate(applicant).is_some() {
            return Err(MatchingError::AlreadyMatched(VertexId::applicant(applicant)));
        }
        if self.post_mate(post).is_some() {
            return Err(MatchingError::AlreadyMatched(VertexId::post(post)));
        }
        if self.applicant_mate.len() <= applicant {
            self.applicant_mate.resize(applicant + 1, None);
        }
        if self.post_mate.len() <= post {
            self.post_mate.resize(post + 1, None);
        }
        self.applicant_mate[applicant] = Some(post);
        self.post_mate[post] = Some(applicant);
        self.len += 1;
        Ok(())
    }

    /// Removes the pair `(applicant, post)`; returns whether it was present.
    pub fn remove(&mut self, applicant: usize, post: usize) -> bool {
        if self.applicant_mate(applicant) != Some(post) {
            return false;
        }
        self.applicant_mate[applicant] = None;
        self.post_mate[post] = None;
        self.len -= 1;
        true
    }

    /// Unmatches `v` if it is matched, returning its former partner.
    pub fn unmatch(&mut self, v: VertexId) -> Option<VertexId> {
        let partner = self.mate(v)?;
        match v.side {
            Side::Applicant => self.remove(v.index, partner.index),
            Side::Post => self.remove(partner.index, v.index),
        };
        Some(partner)
    }

    pub fn applicant_mate(&self, applicant: usize) -> Option<usize> {
        self.applicant_mate.get(applicant).copied().flatten()
    }

    pub fn post_mate(&self, post: usize) -> Option<usize> {
        self.post_mate.get(post).copied().flatten()
    }

    pub fn mate(&self, v: VertexId) -> Option<VertexId> {
        match v.side {
            Side::Applicant => self.applicant_mate(v.index).map(VertexId::post),
            Side::Post => self.post_mate(v.index).map(VertexId::applicant),
        }
    }

    pub fn is_matched(&self, v: VertexId) -> bool {
        self.mate(v).is_some()
    }

    pub fn contains(&self, applicant: usize, post: usize) -> bool {
        self.applicant_mate(applicant) == Some(post)
    }

    /// Pairs in ascending applicant order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.applicant_mate
            .iter()
            .enumerate()
            .filter_map(|(a, p)| p.map(|p| (a, p)))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Pairs rendered with vertex names, sorted.
    pub fn named_pairs(&self, inst: &Instance) -> Vec<(String, String)> {
        let mut out: Vec<_> = self
            .pairs()
            .map(|(a, p)| {
                (
                    inst.name(VertexId::applicant(a)).to_string(),
                    inst.name(VertexId::post(p)).to_string(),
                )
            })
            .collect();
        out.sort();
        out
    }
}

impl PartialEq for Matching {
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len && self.pairs().eq(other.pairs())
    }
}

impl Eq for Matching {}

/// Per-rank counts of matched applicants, compared lexicographically with
/// implicit trailing zeros. Stored with trailing zeros trimmed, so the
/// derived equality already ignores padding.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Signature {
    counts: Vec<u32>,
}

impl Signature {
    pub fn new(mut counts: Vec<u32>) -> Self {
        while counts.last() == Some(&0) {
            counts.pop();
        }
        Signature { counts }
    }

    pub fn empty() -> Self {
        Signature::default()
    }

    /// Counts up to the last non-zero entry; `counts()[0]` is rank 1.
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// Number of applicants matched at `rank` (1-based).
    pub fn count(&self, rank: u32) -> u32 {
        rank.checked_sub(1)
            .and_then(|i| self.counts.get(i as usize))
            .copied()
            .unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| u64::from(c)).sum()
    }

    /// The largest rank with a non-zero count.
    pub fn max_rank(&self) -> u32 {
        self.counts.len() as u32
    }

    /// The first `len` entries, zero-padded.
    pub fn prefix(&self, len: u32) -> Signature {
        Signature::new((1..=len).map(|r| self.count(r)).collect())
    }

    /// Entries padded with zeros to exactly `len` positions.
    pub fn padded(&self, len: usize) -> Vec<u32> {
        let mut v = self.counts.clone();
        v.resize(len.max(v.len()), 0);
        v
    }
}

impl Ord for Signature {
    fn cmp(&self, other: &Self) -> Ordering {
        let len = self.counts.len().max(other.counts.len());
        (0..len)
            .map(|i| {
                let x = self.counts.get(i).copied().unwrap_or(0);
                let y = other.counts.get(i).copied().unwrap_or(0);
                x.cmp(&y)
            })
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    }
}

impl PartialOrd for Signature {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.counts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

impl Serialize for Signature {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.counts.serialize(s)
    }
}

/// `Greater` when `s1 ≻ s2`.
pub fn compare_signatures(s1: &Signature, s2: &Signature) -> Ordering {
    s1.cmp(s2)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    SharedVertex(VertexId),
    NonEdge { applicant: usize, post: usize },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            match v {
                Violation::SharedVertex(x) => write!(f, "vertex {:?}#{} shared", x.side, x.index)?,
                Violation::NonEdge { applicant, post } => {
                    write!(f, "pair (A#{applicant}, P#{post}) is not an edge")?
                }
            }
        }
        Ok(())
    }
}

/// Checks candidate pairs for shared vertices and non-edges.
pub fn validate_matching<I>(inst: &Instance, pairs: I) -> ValidationReport
where
    I: IntoIterator<Item = (usize, usize)>,
{
    let mut seen_a = vec![false; inst.applicant_slots()];
    let mut seen_p = vec![false; inst.post_slots()];
    let mut report = ValidationReport::default();
    for (a, p) in pairs {
        if inst.edge_between(a, p).is_none() {
            report.violations.push(Violation::NonEdge { applicant: a, post: p });
            continue;
        }
        for (seen, v) in [
            (&mut seen_a[a], VertexId::applicant(a)),
            (&mut seen_p[p], VertexId::post(p)),
        ] {
            if *seen {
                if !report.violations.contains(&Violation::SharedVertex(v)) {
                    report.violations.push(Violation::SharedVertex(v));
                }
            } else {
                *seen = true;
            }
        }
    }
    report
}

/// `counts[i]` = applicants matched at rank `i + 1`.
pub fn signature_of(inst: &Instance, m: &Matching) -> Result<Signature, MatchingError> {
    let report = validate_matching(inst, m.pairs());
    if !report.is_ok() {
        return Err(MatchingError::Invalid(report));
    }
    let mut counts = Vec::new();
    for (a, p) in m.pairs() {
        let rank = inst.rank_of(a, p).expect("validated") as usize;
        if counts.len() < rank {
            counts.resize(rank, 0);
        }
        counts[rank - 1] += 1;
    }
    Ok(Signature::new(counts))
}
