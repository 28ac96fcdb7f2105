//! Update operations and their one-per-line log format.
//!
//! ```text
//! addv a9 A : p1:1,p4:2
//! delv a3
//! adde a1 p8 1
//! dele a1 p8
//! ```

use std::fmt;

use serde::Serialize;

use crate::format::{content_lines, ParseError, ParseErrorKind};
use crate::instance::{is_valid_name, Side};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Op {
    AddVertex { name: String, side: Side, neighbors: Vec<(String, u32)> },
    DeleteVertex { name: String },
    AddEdge { applicant: String, post: String, rank: u32 },
    DeleteEdge { applicant: String, post: String },
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Op::AddVertex { name, side, neighbors } => {
                let list: Vec<String> = neighbors.iter().map(|(n, r)| format!("{n}:{r}")).collect();
                write!(f, "addv {name} {side} : {}", list.join(","))
            }
            Op::DeleteVertex { name } => write!(f, "delv {name}"),
            Op::AddEdge { applicant, post, rank } => write!(f, "adde {applicant} {post} {rank}"),
            Op::DeleteEdge { applicant, post } => write!(f, "dele {applicant} {post}"),
        }
    }
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

fn name(line: usize, s: &str) -> Result<String, ParseError> {
    if is_valid_name(s) {
        Ok(s.to_string())
    } else {
        Err(err(line, ParseErrorKind::InvalidName(s.to_string())))
    }
}

fn rank(line: usize, s: &str) -> Result<u32, ParseError> {
    match s.trim().parse::<u32>() {
        Ok(r) if r >= 1 => Ok(r),
        _ => Err(err(line, ParseErrorKind::BadRank(s.to_string()))),
    }
}

/// Parses an operation log into `(line, op)` pairs.
pub fn parse_ops(text: &str) -> Result<Vec<(usize, Op)>, ParseError> {
    content_lines(text).map(|(line, content)| parse_op(line, content).map(|op| (line, op))).collect()
}

fn parse_op(line: usize, content: &str) -> Result<Op, ParseError> {
    let bad = || err(line, ParseErrorKind::BadField(content.to_string()));
    let (head, tail) = match content.split_once(':') {
        Some((h, t)) => (h, Some(t)),
        None => (content, None),
    };
    let fields: Vec<&str> = head.split_whitespace().collect();
    match (fields.as_slice(), tail) {
        (["addv", n, side], Some(list)) => {
            let side = match *side {
                "A" => Side::Applicant,
                "P" => Side::Post,
                _ => return Err(bad()),
            };
            let mut neighbors = Vec::new();
            if !list.trim().is_empty() {
                for item in list.split(',') {
                    let (other, r) = item.trim().rsplit_once(':').ok_or_else(bad)?;
                    neighbors.push((name(line, other.trim())?, rank(line, r)?));
                }
            }
            Ok(Op::AddVertex { name: name(line, n)?, side, neighbors })
        }
        (["delv", n], None) => Ok(Op::DeleteVertex { name: name(line, n)? }),
        (["adde", a, p, r], None) => Ok(Op::AddEdge { applicant: name(line, a)?, post: name(line, p)?, rank: rank(line, r)? }),
        (["dele", a, p], None) => Ok(Op::DeleteEdge { applicant: name(line, a)?, post: name(line, p)? }),
        _ => Err(bad()),
    }
}
