//! Signed graphs and their colorings as DP-colorings.
//!
//! Signed colors are nonzero integers, plus 0 for odd palette sizes: size
//! `2m` uses `{±1, …, ±m}` and size `2m + 1` adds 0. An edge of sign `s`
//! forbids `f(u) = s · f(v)`, which is the matching `{(c, s·c)}` between the
//! two lists. Any list closed under negation gives the same reduction.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::cover::{Color, CoverError, ListAssignment, MatchingAssignment, Transversal};
use crate::embedding::PlaneEmbedding;
use crate::graph::{Graph, GraphError};
use crate::reducer::{color_class_graph, ReduceError};

pub type SignedColor = i32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignedError {
    #[error("line {line}: expected `u v sign`, got {text:?}")]
    Malformed { line: usize, text: String },
    #[error("line {line}: sign must be +1 or -1, got {text:?}")]
    BadSign { line: usize, text: String },
    #[error("edge {u}-{v} has no sign")]
    MissingSign { u: usize, v: usize },
    #[error("{u}-{v} is not an edge")]
    NotAnEdge { u: usize, v: usize },
    #[error("lists given for {found} vertices, graph has {expected}")]
    WrongLength { expected: usize, found: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignedGraph {
    graph: Graph,
    /// `+1` or `-1` per edge, keyed by `(min, max)`.
    #[serde(serialize_with = "crate::cover::serialize_edge_map")]
    sigma: BTreeMap<(usize, usize), i8>,
}

impl SignedGraph {
    pub fn new(graph: Graph, sigma: BTreeMap<(usize, usize), i8>) -> Result<Self, SignedError> {
        for (&(u, v), &s) in &sigma {
            if !graph.has_edge(u, v) || u > v {
                return Err(SignedError::NotAnEdge { u, v });
            }
            if s != 1 && s != -1 {
                return Err(SignedError::BadSign {
                    line: 0,
                    text: s.to_string(),
                });
            }
        }
        if let Some((u, v)) = graph.edges().find(|e| !sigma.contains_key(e)) {
            return Err(SignedError::MissingSign { u, v });
        }
        Ok(SignedGraph { graph, sigma })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize, i8)]) -> Result<Self, SignedError> {
        let graph = Graph::from_edges(
            n,
            &edges.iter().map(|&(u, v, _)| (u, v)).collect::<Vec<_>>(),
        )?;
        let sigma = edges
            .iter()
            .map(|&(u, v, s)| ((u.min(v), u.max(v)), s))
            .collect();
        Self::new(graph, sigma)
    }

    /// Same sign on every edge.
    pub fn uniform(graph: Graph, sign: i8) -> Result<Self, SignedError> {
        let sigma = graph.edges().map(|e| (e, sign)).collect();
        Self::new(graph, sigma)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn sign(&self, u: usize, v: usize) -> i8 {
        self.sigma[&(u.min(v), u.max(v))]
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} {}\n",
            self.graph.vertex_count(),
            self.graph.edge_count()
        );
        for (&(u, v), &s) in &self.sigma {
            out.push_str(&format!("{u} {v} {s}\n"));
        }
        out
    }
}

/// Parses lines `u v s` with `s` in `{1, -1, +1}`; an optional first line
/// `n m` fixes the vertex count. `#` starts a comment.
pub fn parse_signed(text: &str) -> Result<SignedGraph, SignedError> {
    let mut n = None;
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let malformed = || SignedError::Malformed {
            line,
            text: raw.to_string(),
        };
        match tokens.len() {
            2 if n.is_none() && edges.is_empty() => {
                n = Some(tokens[0].parse::<usize>().map_err(|_| malformed())?);
            }
            3 => {
                let u: usize = tokens[0].parse().map_err(|_| malformed())?;
                let v: usize = tokens[1].parse().map_err(|_| malformed())?;
                let s: i8 = match tokens[2] {
                    "1" | "+1" => 1,
                    "-1" => -1,
                    other => {
                        return Err(SignedError::BadSign {
                            line,
                            text: other.to_string(),
                        })
                    }
                };
                if u == v {
                    return Err(GraphError::Loop { line, vertex: u }.into());
                }
                if let Some(n) = n {
                    if u.max(v) >= n {
                        return Err(GraphError::VertexOutOfRange {
                            line,
                            vertex: u.max(v),
                            n,
                        }
                        .into());
                    }
                }
                edges.push((u, v, s));
            }
            _ => return Err(malformed()),
        }
    }
    let n = n.unwrap_or_else(|| {
        edges
            .iter()
            .map(|&(u, v, _)| u.max(v) + 1)
            .max()
            .unwrap_or(0)
    });
    SignedGraph::from_edges(n, &edges)
}

/// The symmetric palette of size `k`.
pub fn signed_colors(k: usize) -> Vec<SignedColor> {
    let m = (k / 2) as SignedColor;
    let mut out: Vec<SignedColor> = (1..=m).flat_map(|c| [-c, c]).collect();
    if k % 2 == 1 {
        out.push(0);
    }
    out.sort_unstable();
    out
}

/// Zigzag encoding into cover colors: `0, -1, 1, -2, 2, …` become
/// `0, 2, 1, 4, 3, …`.
pub fn encode(c: SignedColor) -> Color {
    if c > 0 {
        (2 * c - 1) as Color
    } else {
        (-2 * c) as Color
    }
}

pub fn decode(c: Color) -> SignedColor {
    let c = c as SignedColor;
    if c % 2 == 1 {
        (c + 1) / 2
    } else {
        -c / 2
    }
}

/// Lists and matchings whose transversals are the signed colorings from
/// `lists`. An edge of sign `s` matches `c` at `u` with `s·c` at `v` when
/// both are available.
pub fn signed_lists_to_dp(
    sg: &SignedGraph,
    lists: &[Vec<SignedColor>],
) -> Result<(ListAssignment, MatchingAssignment), SignedError> {
    let n = sg.graph.vertex_count();
    if lists.len() != n {
        return Err(SignedError::WrongLength {
            expected: n,
            found: lists.len(),
        });
    }
    let la = ListAssignment::new(
        lists
            .iter()
            .map(|l| l.iter().map(|&c| encode(c)).collect())
            .collect(),
    )?;
    let mut m = MatchingAssignment::new();
    for (u, v) in sg.graph.edges() {
        let s = sg.sign(u, v) as SignedColor;
        let pairs: Vec<(Color, Color)> = lists[u]
            .iter()
            .filter(|&&c| lists[v].contains(&(s * c)))
            .map(|&c| (encode(c), encode(s * c)))
            .collect();
        m.set(u, v, &pairs)?;
    }
    Ok((la, m))
}

/// Every vertex gets the symmetric palette of size `k`.
pub fn signed_to_dp(sg: &SignedGraph, k: usize) -> (ListAssignment, MatchingAssignment) {
    let palette = signed_colors(k);
    let lists = vec![palette; sg.graph.vertex_count()];
    signed_lists_to_dp(sg, &lists).expect("a symmetric palette yields a valid cover")
}

pub fn transversal_to_signed(t: &Transversal) -> Vec<SignedColor> {
    t.colors.iter().map(|&c| decode(c)).collect()
}

/// First edge whose endpoints violate `f(u) != s·f(v)`.
pub fn signed_conflict(sg: &SignedGraph, colors: &[SignedColor]) -> Option<(usize, usize)> {
    sg.graph
        .edges()
        .find(|&(u, v)| colors[u] == sg.sign(u, v) as SignedColor * colors[v])
}

/// Colors a signed planar graph without 4-cycles adjacent to triangles from
/// lists of at least four signed colors; `None` uses `{±1, ±2}` everywhere.
pub fn signed_choosable_4(
    emb: &PlaneEmbedding,
    sg: &SignedGraph,
    lists: Option<&[Vec<SignedColor>]>,
) -> Result<Vec<SignedColor>, SignedError> {
    let default;
    let lists = match lists {
        Some(l) => l,
        None => {
            default = vec![signed_colors(4); sg.graph.vertex_count()];
            &default
        }
    };
    let (la, m) = signed_lists_to_dp(sg, lists)?;
    let t = color_class_graph(emb, &la, &m)?;
    let colors = transversal_to_signed(&t);
    debug_assert!(signed_conflict(sg, &colors).is_none());
    Ok(colors)
}
