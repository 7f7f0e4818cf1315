//! List assignments, matching assignments and the cover graph whose
//! independent transversals are DP-colorings.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::graph::Graph;

mod solver;

pub use solver::{solve_transversal, solve_with_budget, BudgetExceeded, SolveOutcome};

/// Colors are small integers, local to each vertex's list.
pub type Color = u32;

/// Fibers are encoded as bit masks by the solver.
pub const MAX_LIST_LEN: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverError {
    #[error("vertex {vertex} has an empty list")]
    EmptyList { vertex: usize },
    #[error("vertex {vertex} lists color {color} twice")]
    DuplicateColor { vertex: usize, color: Color },
    #[error("vertex {vertex} has {len} colors; at most {MAX_LIST_LEN} are supported")]
    ListTooLong { vertex: usize, len: usize },
    #[error("expected lists for {expected} vertices, got {found}")]
    WrongLength { expected: usize, found: usize },
    #[error("{u}-{v} is not an edge")]
    NotAnEdge { u: usize, v: usize },
    #[error("color {color} is not in the list of vertex {vertex}")]
    ColorNotInList { vertex: usize, color: Color },
    #[error("matching on {u}-{v} uses color {color} of vertex {vertex} twice")]
    NotAMatching {
        u: usize,
        v: usize,
        vertex: usize,
        color: Color,
    },
    #[error("vertices {u} and {v} are colored {cu} and {cv}, which are matched")]
    Conflict {
        u: usize,
        v: usize,
        cu: Color,
        cv: Color,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ListAssignment {
    lists: Vec<Vec<Color>>,
}

impl ListAssignment {
    /// Lists are stored sorted; empty lists and repeated colors are rejected.
    pub fn new(lists: Vec<Vec<Color>>) -> Result<Self, CoverError> {
        let mut lists = lists;
        for (vertex, list) in lists.iter_mut().enumerate() {
            if list.is_empty() {
                return Err(CoverError::EmptyList { vertex });
            }
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(CoverError::DuplicateColor {
                    vertex,
                    color: w[0],
                });
            }
        }
        Ok(ListAssignment { lists })
    }

    /// Every vertex gets `{0, .., k-1}`.
    pub fn uniform(n: usize, k: usize) -> Self {
        Self::with_sizes(&vec![k; n])
    }

    /// Vertex `v` gets `{0, .., sizes[v]-1}`.
    pub fn with_sizes(sizes: &[usize]) -> Self {
        let lists = sizes.iter().map(|&s| (0..s as Color).collect()).collect();
        Self::new(lists).expect("sizes are positive")
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    pub fn list(&self, v: usize) -> &[Color] {
        &self.lists[v]
    }

    pub fn lists(&self) -> &[Vec<Color>] {
        &self.lists
    }

    pub fn contains(&self, v: usize, c: Color) -> bool {
        self.lists[v].binary_search(&c).is_ok()
    }

    pub fn index_of(&self, v: usize, c: Color) -> Option<usize> {
        self.lists[v].binary_search(&c).ok()
    }

    pub fn min_size(&self) -> usize {
        self.lists.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// True when every list has at least `k` colors.
    pub fn is_k_assignment(&self, k: usize) -> bool {
        self.lists.iter().all(|l| l.len() >= k)
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.lists.iter().map(Vec::len).collect()
    }
}

/// Per-edge matchings between endpoint lists, stored once per edge under
/// `(min, max)` with pairs oriented as (color of min, color of max).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
pub struct MatchingAssignment {
    #[serde(serialize_with = "serialize_edge_map")]
    edges: BTreeMap<(usize, usize), Vec<(Color, Color)>>,
}

/// Edge-keyed maps serialize as `(u, v, value)` sequences, since tuple keys
/// are not valid in every format.
pub(crate) fn serialize_edge_map<S, V>(
    map: &BTreeMap<(usize, usize), V>,
    s: S,
) -> Result<S::Ok, S::Error>
where
    S: serde::Serializer,
    V: Serialize,
{
    s.collect_seq(map.iter().map(|(&(u, v), value)| (u, v, value)))
}

impl MatchingAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets the matching on `u`-`v`; `pairs` are oriented from `u` to `v`.
    /// Pairs repeating a color on either side are rejected.
    pub fn set(&mut self, u: usize, v: usize, pairs: &[(Color, Color)]) -> Result<(), CoverError> {
        let mut oriented: Vec<(Color, Color)> = if u < v {
            pairs.to_vec()
        } else {
            pairs.iter().map(|&(a, b)| (b, a)).collect()
        };
        let (a, b) = (u.min(v), u.max(v));
        oriented.sort_unstable();
        for side in 0..2 {
            let mut colors: Vec<Color> = oriented
                .iter()
                .map(|p| if side == 0 { p.0 } else { p.1 })
                .collect();
            colors.sort_unstable();
            if let Some(w) = colors.windows(2).find(|w| w[0] == w[1]) {
                let vertex = if side == 0 { a } else { b };
                return Err(CoverError::NotAMatching {
                    u: a,
                    v: b,
                    vertex,
                    color: w[0],
                });
            }
        }
        self.edges.insert((a, b), oriented);
        Ok(())
    }

    /// Matching on `u`-`v` oriented from `u`; empty when unset.
    pub fn get(&self, u: usize, v: usize) -> Vec<(Color, Color)> {
        match self.edges.get(&(u.min(v), u.max(v))) {
            None => Vec::new(),
            Some(p) if u < v => p.clone(),
            Some(p) => p.iter().map(|&(a, b)| (b, a)).collect(),
        }
    }

    /// The color of `v` matched to color `cu` of `u`, if any.
    pub fn matched(&self, u: usize, cu: Color, v: usize) -> Option<Color> {
        let pairs = self.edges.get(&(u.min(v), u.max(v)))?;
        if u < v {
            pairs.iter().find(|p| p.0 == cu).map(|p| p.1)
        } else {
            pairs.iter().find(|p| p.1 == cu).map(|p| p.0)
        }
    }

    /// Edges carrying a matching (possibly empty), as `((u, v), pairs)` with `u < v`.
    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize), &Vec<(Color, Color)>)> {
        self.edges.iter()
    }

    pub fn pair_count(&self) -> usize {
        self.edges.values().map(Vec::len).sum()
    }

    /// Keeps the edges with both endpoints in `keep`, renumbering vertices
    /// as in `Graph::induced`.
    pub fn restrict(&self, keep: &[usize]) -> MatchingAssignment {
        let mut index = std::collections::HashMap::new();
        for (i, &v) in keep.iter().enumerate() {
            index.insert(v, i);
        }
        let mut out = MatchingAssignment::new();
        for (&(u, v), pairs) in &self.edges {
            if let (Some(&a), Some(&b)) = (index.get(&u), index.get(&v)) {
                out.set(a, b, pairs).expect("restriction of a matching");
            }
        }
        out
    }
}

/// The cover: nodes `(v, c)` for `c` in `L(v)`, a clique on each fiber, and
/// the matching edges between fibers of adjacent vertices.
#[derive(Debug, Clone)]
pub struct CoverGraph {
    graph: Graph,
    lists: ListAssignment,
    offsets: Vec<usize>,
    node_vertex: Vec<usize>,
    cross: Vec<Vec<usize>>,
}

impl CoverGraph {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn lists(&self) -> &ListAssignment {
        &self.lists
    }

    pub fn node_count(&self) -> usize {
        self.node_vertex.len()
    }

    pub fn node_id(&self, v: usize, c: Color) -> Option<usize> {
        self.lists.index_of(v, c).map(|i| self.offsets[v] + i)
    }

    /// The `(vertex, color)` pair of a node.
    pub fn node(&self, id: usize) -> (usize, Color) {
        let v = self.node_vertex[id];
        (v, self.lists.list(v)[id - self.offsets[v]])
    }

    pub fn fiber(&self, v: usize) -> std::ops::Range<usize> {
        self.offsets[v]..self.offsets[v] + self.lists.list(v).len()
    }

    /// Neighbors of a node outside its own fiber.
    pub fn cross_neighbors(&self, id: usize) -> &[usize] {
        &self.cross[id]
    }

    pub fn cross_edge_count(&self) -> usize {
        self.cross.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn edge_count(&self) -> usize {
        let fiber_edges: usize = self
            .lists
            .lists()
            .iter()
            .map(|l| l.len() * (l.len() - 1) / 2)
            .sum();
        fiber_edges + self.cross_edge_count()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        if a == b {
            return false;
        }
        self.node_vertex[a] == self.node_vertex[b] || self.cross[a].binary_search(&b).is_ok()
    }

    pub fn is_independent(&self, nodes: &[usize]) -> bool {
        nodes
            .iter()
            .enumerate()
            .all(|(i, &a)| nodes[i + 1..].iter().all(|&b| !self.has_edge(a, b)))
    }

    /// Checks a transversal directly: one color per vertex from its list and
    /// no chosen pair matched across an edge.
    pub fn verify(&self, t: &Transversal) -> Result<(), CoverError> {
        let n = self.graph.vertex_count();
        if t.colors.len() != n {
            return Err(CoverError::WrongLength {
                expected: n,
                found: t.colors.len(),
            });
        }
        let mut ids = Vec::with_capacity(n);
        for (v, &c) in t.colors.iter().enumerate() {
            ids.push(self.node_id(v, c).ok_or(CoverError::ColorNotInList {
                vertex: v,
                color: c,
            })?);
        }
        for (u, v) in self.graph.edges() {
            if self.cross[ids[u]].binary_search(&ids[v]).is_ok() {
                return Err(CoverError::Conflict {
                    u,
                    v,
                    cu: t.colors[u],
                    cv: t.colors[v],
                });
            }
        }
        Ok(())
    }
}

/// A DP-coloring: the chosen color of every vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Transversal {
    pub colors: Vec<Color>,
}

/// Builds the cover of `g` for lists `lists` and matchings `m`.
pub fn build_cover(
    g: &Graph,
    lists: &ListAssignment,
    m: &MatchingAssignment,
) -> Result<CoverGraph, CoverError> {
    let n = g.vertex_count();
    if lists.len() != n {
        return Err(CoverError::WrongLength {
            expected: n,
            found: lists.len(),
        });
    }
    let mut offsets = Vec::with_capacity(n);
    let mut node_vertex = Vec::new();
    for v in 0..n {
        let len = lists.list(v).len();
        if len > MAX_LIST_LEN {
            return Err(CoverError::ListTooLong { vertex: v, len });
        }
        offsets.push(node_vertex.len());
        node_vertex.extend(std::iter::repeat_n(v, len));
    }
    let mut cross = vec![Vec::new(); node_vertex.len()];
    for (&(u, v), pairs) in m.iter() {
        if !g.has_edge(u, v) {
            return Err(CoverError::NotAnEdge { u, v });
        }
        for &(cu, cv) in pairs {
            let a = lists.index_of(u, cu).ok_or(CoverError::ColorNotInList {
                vertex: u,
                color: cu,
            })?;
            let b = lists.index_of(v, cv).ok_or(CoverError::ColorNotInList {
                vertex: v,
                color: cv,
            })?;
            cross[offsets[u] + a].push(offsets[v] + b);
            cross[offsets[v] + b].push(offsets[u] + a);
        }
    }
    for c in &mut cross {
        c.sort_unstable();
    }
    Ok(CoverGraph {
        graph: g.clone(),
        lists: lists.clone(),
        offsets,
        node_vertex,
        cross,
    })
}

/// Matches equal colors on every edge; the cover's transversals are then
/// exactly the proper L-colorings.
pub fn identity_assignment(g: &Graph, lists: &ListAssignment) -> MatchingAssignment {
    let mut m = MatchingAssignment::new();
    for (u, v) in g.edges() {
        let pairs: Vec<(Color, Color)> = lists
            .list(u)
            .iter()
            .filter(|&&c| lists.contains(v, c))
            .map(|&c| (c, c))
            .collect();
        m.set(u, v, &pairs).expect("identity pairs form a matching");
    }
    m
}

/// A uniformly random full matching on every edge: each edge matches
/// `min(|L(u)|, |L(v)|)` pairs.
pub fn random_full_matching<R: rand::Rng + ?Sized>(
    g: &Graph,
    lists: &ListAssignment,
    rng: &mut R,
) -> MatchingAssignment {
    use rand::seq::SliceRandom;
    let mut m = MatchingAssignment::new();
    for (u, v) in g.edges() {
        let mut a = lists.list(u).to_vec();
        let mut b = lists.list(v).to_vec();
        a.shuffle(rng);
        b.shuffle(rng);
        let pairs: Vec<(Color, Color)> = a.into_iter().zip(b).collect();
        m.set(u, v, &pairs).expect("distinct colors on both sides");
    }
    m
}

/// A partial coloring: `Some(color)` for colored vertices.
pub type PartialColoring = Vec<Option<Color>>;

/// Residual lists of the uncolored vertices: each loses the colors matched to
/// the chosen colors of its colored neighbors.
pub fn residual_lists(
    g: &Graph,
    lists: &ListAssignment,
    m: &MatchingAssignment,
    partial: &[Option<Color>],
) -> Result<BTreeMap<usize, Vec<Color>>, CoverError> {
    let n = g.vertex_count();
    if partial.len() != n {
        return Err(CoverError::WrongLength {
            expected: n,
            found: partial.len(),
        });
    }
    for (v, c) in partial.iter().enumerate() {
        if let Some(c) = *c {
            if !lists.contains(v, c) {
                return Err(CoverError::ColorNotInList {
                    vertex: v,
                    color: c,
                });
            }
        }
    }
    for (u, v) in g.edges() {
        if let (Some(cu), Some(cv)) = (partial[u], partial[v]) {
            if m.matched(u, cu, v) == Some(cv) {
                return Err(CoverError::Conflict { u, v, cu, cv });
            }
        }
    }
    let mut out = BTreeMap::new();
    for v in (0..n).filter(|&v| partial[v].is_none()) {
        let blocked: Vec<Color> = g
            .neighbors(v)
            .iter()
            .filter_map(|&u| partial[u].and_then(|cu| m.matched(u, cu, v)))
            .collect();
        let rest = lists
            .list(v)
            .iter()
            .copied()
            .filter(|c| !blocked.contains(c))
            .collect();
        out.insert(v, rest);
    }
    Ok(out)
}
