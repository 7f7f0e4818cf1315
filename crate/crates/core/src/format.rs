//! Line-based text formats for embeddings, assignments and certificate
//! bundles.
//!
//! ```text
//! # comment
//! n: 3
//! rotation 0: [2, 1]
//! rotation 1: [0, 2]
//! rotation 2: [1, 0]
//! list 0: [0, 1, 2, 3]
//! edge 0 1: [(0, 1), (1, 0)]
//! ```
//!
//! An embedding file holds the `n:` and `rotation` lines, an assignment file
//! the `list` and `edge` lines, and a bundle all of them plus `#` notes. Each
//! parser skips the other kind's lines, so a bundle can be read as either.

use std::fmt::Write as _;

use thiserror::Error;

use crate::cover::{Color, CoverError, ListAssignment, MatchingAssignment};
use crate::embedding::{EmbeddingError, PlaneEmbedding};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `n:` line")]
    MissingVertexCount,
    #[error("vertex {vertex} has no `{kind}` line")]
    Missing { kind: &'static str, vertex: usize },
    #[error("line {line}: vertex {vertex} out of range for n = {n}")]
    OutOfRange {
        line: usize,
        vertex: usize,
        n: usize,
    },
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Cover(#[from] CoverError),
}

enum Line {
    Count(usize),
    Rotation(usize, Vec<usize>),
    List(usize, Vec<Color>),
    Edge(usize, usize, Vec<(Color, Color)>),
}

fn numbers<T: std::str::FromStr>(s: &str, line: usize) -> Result<Vec<T>, FormatError> {
    s.split(|c: char| !c.is_ascii_digit())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse().map_err(|_| FormatError::Syntax {
                line,
                message: format!("bad number `{t}`"),
            })
        })
        .collect()
}

fn parse_lines(text: &str) -> Result<Vec<(usize, Line)>, FormatError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap().trim();
        if body.is_empty() {
            continue;
        }
        let syntax = |message: &str| FormatError::Syntax {
            line,
            message: message.to_string(),
        };
        let (head, payload) = body
            .split_once(':')
            .ok_or_else(|| syntax("expected `key: value`"))?;
        let mut words = head.split_whitespace();
        let key = words.next().ok_or_else(|| syntax("missing key"))?;
        let ids: Vec<usize> = numbers(&words.collect::<Vec<_>>().join(" "), line)?;
        let parsed = match (key, ids.as_slice()) {
            ("n", []) => {
                let v: Vec<usize> = numbers(payload, line)?;
                match v.as_slice() {
                    [n] => Line::Count(*n),
                    _ => return Err(syntax("`n:` takes one number")),
                }
            }
            ("rotation", [v]) => Line::Rotation(*v, numbers(payload, line)?),
            ("list", [v]) => Line::List(*v, numbers(payload, line)?),
            ("edge", [u, v]) => {
                let flat: Vec<Color> = numbers(payload, line)?;
                if !flat.len().is_multiple_of(2) {
                    return Err(syntax("edge pairs need an even number of colors"));
                }
                Line::Edge(*u, *v, flat.chunks(2).map(|p| (p[0], p[1])).collect())
            }
            _ => return Err(syntax(&format!("unrecognized line `{head}:`"))),
        };
        out.push((line, parsed));
    }
    Ok(out)
}

fn vertex_count(lines: &[(usize, Line)]) -> Result<usize, FormatError> {
    lines
        .iter()
        .find_map(|(_, l)| match l {
            Line::Count(n) => Some(*n),
            _ => None,
        })
        .ok_or(FormatError::MissingVertexCount)
}

fn check_range(line: usize, vertex: usize, n: usize) -> Result<(), FormatError> {
    if vertex >= n {
        return Err(FormatError::OutOfRange { line, vertex, n });
    }
    Ok(())
}

pub fn parse_embedding(text: &str) -> Result<PlaneEmbedding, FormatError> {
    let lines = parse_lines(text)?;
    let n = vertex_count(&lines)?;
    let mut rot: Vec<Option<Vec<usize>>> = vec![None; n];
    for (line, l) in lines {
        if let Line::Rotation(v, r) = l {
            check_range(line, v, n)?;
            if rot[v].replace(r).is_some() {
                return Err(FormatError::Syntax {
                    line,
                    message: format!("second rotation for vertex {v}"),
                });
            }
        }
    }
    let rot = rot
        .into_iter()
        .enumerate()
        .map(|(vertex, r)| {
            r.ok_or(FormatError::Missing {
                kind: "rotation",
                vertex,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PlaneEmbedding::new(rot)?)
}

/// Reads lists for vertices `0..n` and the matchings. Edges are not checked
/// against a graph here; building the cover does that.
pub fn parse_assignment(
    text: &str,
    n: usize,
) -> Result<(ListAssignment, MatchingAssignment), FormatError> {
    let lines = parse_lines(text)?;
    let mut lists: Vec<Option<Vec<Color>>> = vec![None; n];
    let mut m = MatchingAssignment::new();
    for (line, l) in lines {
        match l {
            Line::List(v, colors) => {
                check_range(line, v, n)?;
                if lists[v].replace(colors).is_some() {
                    return Err(FormatError::Syntax {
                        line,
                        message: format!("second list for vertex {v}"),
                    });
                }
            }
            Line::Edge(u, v, pairs) => {
                check_range(line, u, n)?;
                check_range(line, v, n)?;
                m.set(u, v, &pairs)?;
            }
            _ => {}
        }
    }
    let lists = lists
        .into_iter()
        .enumerate()
        .map(|(vertex, l)| {
            l.ok_or(FormatError::Missing {
                kind: "list",
                vertex,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((ListAssignment::new(lists)?, m))
}

/// A self-contained failure certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bundle {
    pub embedding: PlaneEmbedding,
    pub lists: ListAssignment,
    pub matching: MatchingAssignment,
    pub notes: Vec<String>,
}

pub fn parse_bundle(text: &str) -> Result<Bundle, FormatError> {
    let embedding = parse_embedding(text)?;
    let (lists, matching) = parse_assignment(text, embedding.vertex_count())?;
    let notes = text
        .lines()
        .filter_map(|l| l.trim().strip_prefix('#'))
        .map(|l| l.trim().to_string())
        .collect();
    Ok(Bundle {
        embedding,
        lists,
        matching,
        notes,
    })
}

fn join<T: ToString>(items: &[T]) -> String {
    items
        .iter()
        .map(T::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn write_embedding(emb: &PlaneEmbedding) -> String {
    let mut s = format!("n: {}\n", emb.vertex_count());
    for (v, r) in emb.rotations().iter().enumerate() {
        writeln!(s, "rotation {v}: [{}]", join(r)).unwrap();
    }
    s
}

pub fn write_assignment(lists: &ListAssignment, m: &MatchingAssignment) -> String {
    let mut s = String::new();
    for (v, l) in lists.lists().iter().enumerate() {
        writeln!(s, "list {v}: [{}]", join(l)).unwrap();
    }
    for (&(u, v), pairs) in m.iter() {
        let p: Vec<String> = pairs.iter().map(|(a, b)| format!("({a}, {b})")).collect();
        writeln!(s, "edge {u} {v}: [{}]", p.join(", ")).unwrap();
    }
    s
}

pub fn write_bundle(b: &Bundle) -> String {
    let mut s = String::new();
    for note in &b.notes {
        for line in note.lines() {
            writeln!(s, "# {line}").unwrap();
        }
    }
    s.push_str(&write_embedding(&b.embedding));
    s.push_str(&write_assignment(&b.lists, &b.matching));
    s
}
