//! Text formats: preference lists and matchings.
//!
//! A preference document has one line per applicant:
//!
//! ```text
//! # comment
//! a2 : p1, (p2, p3)
//! ```
//!
//! List position defines rank and a parenthesised group shares one rank.
//! Matchings are written one pair per line as `<applicant> <post> <rank>`.

use std::collections::HashSet;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::instance::{is_valid_name, Instance, InstanceError, Side, VertexId};
use crate::matching::Matching;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    MissingColon,
    InvalidName(String),
    EmptyPostName,
    MalformedParentheses,
    DuplicateApplicant(String),
    DuplicatePost(String),
    NameConflict(String),
    UnknownVertex(String),
    NotAnEdge(String, String),
    BadRank(String),
    BadField(String),
    RankMismatch { expected: u32, found: u32 },
    Instance(InstanceError),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ParseErrorKind::*;
        match self {
            MissingColon => f.write_str("expected `<name> : <list>`"),
            InvalidName(n) => write!(f, "invalid name `{n}`"),
            EmptyPostName => f.write_str("empty post name"),
            MalformedParentheses => f.write_str("malformed parentheses"),
            DuplicateApplicant(n) => write!(f, "applicant `{n}` listed twice"),
            DuplicatePost(n) => write!(f, "post `{n}` appears twice in one list"),
            NameConflict(n) => write!(f, "`{n}` is used both as an applicant and a post"),
            UnknownVertex(n) => write!(f, "unknown vertex `{n}`"),
            NotAnEdge(a, p) => write!(f, "`{a}` does not list `{p}`"),
            BadRank(r) => write!(f, "invalid rank `{r}`"),
            BadField(s) => write!(f, "unexpected field `{s}`"),
            RankMismatch { expected, found } => {
                write!(f, "edge has rank {expected}, line says {found}")
            }
            Instance(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WriteError {
    #[error("applicant `{0}` has non-consecutive ranks; list positions cannot express them")]
    GappedRanks(String),
    #[error("post `{0}` has no incident edge and cannot be written")]
    IsolatedPost(String),
}

/// Lines that carry content: trimmed, without comments and blanks, with
/// their 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

/// Splits a preference list into rank groups.
fn parse_groups(line: usize, list: &str) -> Result<Vec<Vec<String>>, ParseError> {
    let mut groups = Vec::new();
    if list.trim().is_empty() {
        return Ok(groups);
    }
    let mut rest = list.trim();
    loop {
        let group: Vec<String>;
        if let Some(inner) = rest.strip_prefix('(') {
            let close = inner
                .find(')')
                .ok_or_else(|| err(line, ParseErrorKind::MalformedParentheses))?;
            let body = &inner[..close];
            if body.contains('(') {
                return Err(err(line, ParseErrorKind::MalformedParentheses));
            }
            group = body.split(',').map(|s| s.trim().to_string()).collect();
            rest = inner[close + 1..].trim_start();
        } else {
            let end = rest.find(',').unwrap_or(rest.len());
            let name = rest[..end].trim();
            if name.contains('(') || name.contains(')') {
                return Err(err(line, ParseErrorKind::MalformedParentheses));
            }
            group = vec![name.to_string()];
            rest = &rest[end..];
        }
        for name in &group {
            if name.is_empty() {
                return Err(err(line, ParseErrorKind::EmptyPostName));
            }
            if !is_valid_name(name) {
                return Err(err(line, ParseErrorKind::InvalidName(name.clone())));
            }
        }
        groups.push(group);
        if rest.is_empty() {
            break;
        }
        rest = rest
            .strip_prefix(',')
            .ok_or_else(|| err(line, ParseErrorKind::MalformedParentheses))?
            .trim_start();
        if rest.is_empty() {
            return Err(err(line, ParseErrorKind::EmptyPostName));
        }
    }
    Ok(groups)
}

/// Parses a preference-list document.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut rows = Vec::new();
    let mut applicant_names = HashSet::new();
    // Syntax and per-line checks for the whole document come first.
    for (line, content) in content_lines(text) {
        let (name, list) = content
            .split_once(':')
            .ok_or_else(|| err(line, ParseErrorKind::MissingColon))?;
        let name = name.trim();
        if !is_valid_name(name) {
            return Err(err(line, ParseErrorKind::InvalidName(name.to_string())));
        }
        if !applicant_names.insert(name.to_string()) {
            return Err(err(line, ParseErrorKind::DuplicateApplicant(name.to_string())));
        }
        let groups = parse_groups(line, list)?;
        let mut seen = HashSet::new();
        for post in groups.iter().flatten() {
            if !seen.insert(post.as_str()) {
                return Err(err(line, ParseErrorKind::DuplicatePost(post.clone())));
            }
        }
        rows.push((line, name.to_string(), groups));
    }

    let mut inst = Instance::new();
    for (line, name, groups) in &rows {
        let a = match inst.add_applicant(name) {
            Ok(v) => v.index,
            Err(_) => return Err(err(*line, ParseErrorKind::NameConflict(name.clone()))),
        };
        for (pos, group) in groups.iter().enumerate() {
            for post in group {
                let p = match inst.lookup(post) {
                    Some(v) if v.side == Side::Post => v,
                    Some(_) => {
                        return Err(err(*line, ParseErrorKind::NameConflict(post.clone())))
                    }
                    None => inst.add_post(post).expect("name is fresh"),
                };
                inst.add_edge(a, p.index, pos as u32 + 1)
                    .map_err(|e| err(*line, ParseErrorKind::Instance(e)))?;
            }
        }
    }
    Ok(inst)
}

/// Writes an instance back as preference lists. Every applicant's ranks
/// must be consecutive from 1 and every post must have an edge.
pub fn write_instance(inst: &Instance) -> Result<String, WriteError> {
    if let Some(p) = inst.posts().find(|&p| inst.incident(p).is_empty()) {
        return Err(WriteError::IsolatedPost(inst.name(p).to_string()));
    }
    let mut out = String::new();
    for a in inst.applicants() {
        let mut by_rank: Vec<Vec<&str>> = Vec::new();
        for &e in inst.incident(a) {
            let edge = inst.edge(e).expect("incident edges are live");
            let r = edge.rank as usize;
            if by_rank.len() < r {
                by_rank.resize(r, Vec::new());
            }
            by_rank[r - 1].push(inst.name(VertexId::post(edge.post)));
        }
        if by_rank.iter().any(Vec::is_empty) {
            return Err(WriteError::GappedRanks(inst.name(a).to_string()));
        }
        let items: Vec<String> = by_rank
            .iter()
            .map(|g| match g.as_slice() {
                [one] => one.to_string(),
                many => format!("({})", many.join(",")),
            })
            .collect();
        let _ = writeln!(out, "{} : {}", inst.name(a), items.join(","));
    }
    Ok(out)
}

/// One `<applicant> <post> <rank>` line per pair, sorted by name.
pub fn write_matching(inst: &Instance, m: &Matching) -> String {
    let mut lines: Vec<String> = m
        .pairs()
        .map(|(a, p)| {
            format!(
                "{} {} {}",
                inst.name(VertexId::applicant(a)),
                inst.name(VertexId::post(p)),
                inst.rank_of(a, p).unwrap_or(0)
            )
        })
        .collect();
    lines.sort();
    lines.iter().map(|l| format!("{l}\n")).collect()
}

/// Parses the matching format against `inst`. The rank column is optional
/// and, when present, must agree with the edge.
pub fn parse_matching(inst: &Instance, text: &str) -> Result<Matching, ParseError> {
    let mut m = Matching::new();
    for (line, content) in content_lines(text) {
        let fields: Vec<&str> = content.split_whitespace().collect();
        let (a_name, p_name, rank) = match fields.as_slice() {
            [a, p] => (*a, *p, None),
            [a, p, r] => {
                let r: u32 = r
                    .parse()
                    .map_err(|_| err(line, ParseErrorKind::BadRank(r.to_string())))?;
                (*a, *p, Some(r))
            }
            _ => return Err(err(line, ParseErrorKind::BadField(content.to_string()))),
        };
        let a = inst
            .lookup_side(a_name, Side::Applicant)
            .map_err(|_| err(line, ParseErrorKind::UnknownVertex(a_name.to_string())))?;
        let p = inst
            .lookup_side(p_name, Side::Post)
            .map_err(|_| err(line, ParseErrorKind::UnknownVertex(p_name.to_string())))?;
        let actual = inst.rank_of(a.index, p.index).ok_or_else(|| {
            err(line, ParseErrorKind::NotAnEdge(a_name.to_string(), p_name.to_string()))
        })?;
        if let Some(r) = rank {
            if r != actual {
                return Err(err(line, ParseErrorKind::RankMismatch { expected: actual, found: r }));
            }
        }
        m.insert(a.index, p.index).map_err(|_| {
            err(line, ParseErrorKind::BadField(format!("{a_name} or {p_name} matched twice")))
        })?;
    }
    Ok(m)
}
