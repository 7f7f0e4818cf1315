//! Adversarial search over matching assignments.
//!
//! Feasibility is invariant under renaming the colors inside any one fiber,
//! so along a spanning forest every edge can be made canonical by renaming
//! the child fiber. Only non-forest edges keep a free choice. Adding pairs to
//! a matching never creates a transversal, so maximum matchings (size
//! `min(|L(u)|, |L(v)|)`) are the only ones worth trying.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::Serialize;
use thiserror::Error;

use crate::cover::{
    build_cover, solve_with_budget, BudgetExceeded, Color, ListAssignment, MatchingAssignment,
};
use crate::graph::Graph;
use crate::par::{self, Execution};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("lists are not all of size {expected}: vertex {vertex} has {found}")]
    NonUniformLists {
        vertex: usize,
        expected: usize,
        found: usize,
    },
    #[error("matching on {u}-{v} is not a bijection between the two lists")]
    NotBijection { u: usize, v: usize },
}

/// BFS spanning forest, roots at the smallest vertex of each component,
/// neighbors visited in increasing order. Returns `(parent, child)` edges in
/// discovery order.
pub fn spanning_forest(g: &Graph) -> Vec<(usize, usize)> {
    let n = g.vertex_count();
    let mut seen = vec![false; n];
    let mut tree = Vec::new();
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &w in g.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    tree.push((u, w));
                    queue.push_back(w);
                }
            }
        }
    }
    tree
}

/// A normalized assignment and the per-vertex color renaming that produced
/// it (`relabel[v][&old] == new`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalized {
    pub assignment: MatchingAssignment,
    pub relabel: Vec<BTreeMap<Color, Color>>,
}

/// Renames colors fiber by fiber so that every spanning-forest edge carries
/// the identity matching. Requires equal list sizes and bijective matchings
/// on every edge.
pub fn normalize_assignment(
    g: &Graph,
    lists: &ListAssignment,
    m: &MatchingAssignment,
) -> Result<Normalized, NormalizeError> {
    let n = g.vertex_count();
    let k = if n == 0 { 0 } else { lists.list(0).len() };
    for v in 0..n {
        let found = lists.list(v).len();
        if found != k {
            return Err(NormalizeError::NonUniformLists {
                vertex: v,
                expected: k,
                found,
            });
        }
    }
    for (u, v) in g.edges() {
        let pairs = m.get(u, v);
        let ok = pairs.len() == k
            && pairs
                .iter()
                .all(|&(a, b)| lists.contains(u, a) && lists.contains(v, b));
        if !ok {
            return Err(NormalizeError::NotBijection { u, v });
        }
    }
    let mut relabel: Vec<BTreeMap<Color, Color>> = vec![BTreeMap::new(); n];
    let tree = spanning_forest(g);
    let mut is_child = vec![false; n];
    for &(_, c) in &tree {
        is_child[c] = true;
    }
    for v in (0..n).filter(|&v| !is_child[v]) {
        relabel[v] = lists.list(v).iter().map(|&c| (c, c)).collect();
    }
    for &(p, c) in &tree {
        let map = m
            .get(p, c)
            .iter()
            .map(|&(a, b)| (b, relabel[p][&a]))
            .collect();
        relabel[c] = map;
    }
    let mut assignment = MatchingAssignment::new();
    for (u, v) in g.edges() {
        let pairs: Vec<(Color, Color)> = m
            .get(u, v)
            .iter()
            .map(|&(a, b)| (relabel[u][&a], relabel[v][&b]))
            .collect();
        assignment
            .set(u, v, &pairs)
            .expect("renaming preserves matchings");
    }
    Ok(Normalized {
        assignment,
        relabel,
    })
}

/// All normalized maximum matching assignments for lists `{0..s_v}`, as a
/// mixed-radix index space. Slots are ordered by edge, the first edge being
/// the most significant digit, so index order is lexicographic order.
// (u, v, options) with pairs oriented u -> v
type Slot = (usize, usize, Vec<Vec<(Color, Color)>>);

#[derive(Debug, Clone)]
pub struct AssignmentSpace {
    lists: ListAssignment,
    slots: Vec<Slot>,
    size: u128,
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            cur.push(x);
            rec(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Injective sequences of length `k` over `0..n`, lexicographic.
fn injections(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in 0..n {
            if !used[x] {
                used[x] = true;
                cur.push(x);
                rec(n, k, cur, used, out);
                cur.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(n, k, &mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

impl AssignmentSpace {
    pub fn new(g: &Graph, sizes: &[usize]) -> Self {
        assert_eq!(sizes.len(), g.vertex_count());
        let lists = ListAssignment::with_sizes(sizes);
        let tree = spanning_forest(g);
        let mut slots = Vec::new();
        for (u, v) in g.edges() {
            let (su, sv) = (sizes[u], sizes[v]);
            let tree_edge = tree
                .iter()
                .find(|&&(p, c)| (p, c) == (u, v) || (p, c) == (v, u));
            let options: Vec<Vec<(Color, Color)>> = match tree_edge {
                Some(&(p, c)) => {
                    let (sp, sc) = (sizes[p], sizes[c]);
                    let parent_side: Vec<Vec<usize>> = if sc >= sp {
                        vec![(0..sp).collect()]
                    } else {
                        combinations(sp, sc)
                    };
                    parent_side
                        .into_iter()
                        .map(|subset| {
                            // child color j is matched to parent color subset[j]
                            subset
                                .iter()
                                .enumerate()
                                .map(|(j, &a)| {
                                    let (pc, cc) = (a as Color, j as Color);
                                    if p == u {
                                        (pc, cc)
                                    } else {
                                        (cc, pc)
                                    }
                                })
                                .collect()
                        })
                        .collect()
                }
                None if su <= sv => injections(sv, su)
                    .into_iter()
                    .map(|img| {
                        img.iter()
                            .enumerate()
                            .map(|(i, &b)| (i as Color, b as Color))
                            .collect()
                    })
                    .collect(),
                None => injections(su, sv)
                    .into_iter()
                    .map(|img| {
                        img.iter()
                            .enumerate()
                            .map(|(j, &a)| (a as Color, j as Color))
                            .collect()
                    })
                    .collect(),
            };
            slots.push((u, v, options));
        }
        let size = slots
            .iter()
            .try_fold(1u128, |acc, s| acc.checked_mul(s.2.len() as u128))
            .unwrap_or(u128::MAX);
        AssignmentSpace { lists, slots, size }
    }

    pub fn lists(&self) -> &ListAssignment {
        &self.lists
    }

    pub fn size(&self) -> u128 {
        self.size
    }

    /// Number of edges with more than one option.
    pub fn free_edges(&self) -> usize {
        self.slots.iter().filter(|s| s.2.len() > 1).count()
    }

    pub fn decode(&self, mut index: u64) -> MatchingAssignment {
        let mut digits = vec![0usize; self.slots.len()];
        for (i, slot) in self.slots.iter().enumerate().rev() {
            let r = slot.2.len() as u64;
            digits[i] = (index % r) as usize;
            index /= r;
        }
        let mut m = MatchingAssignment::new();
        for (slot, &d) in self.slots.iter().zip(&digits) {
            m.set(slot.0, slot.1, &slot.2[d])
                .expect("options are matchings");
        }
        m
    }
}

/// Outcome of an exhaustive hard-assignment search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HardSearch {
    pub lists: ListAssignment,
    /// The lexicographically first assignment without a transversal.
    pub witness: Option<MatchingAssignment>,
    pub witness_index: Option<u64>,
    pub space_size: u128,
    /// Work spent: one unit per assignment checked plus solver nodes.
    pub work: u64,
}

/// The six-vertex theta graph: a 5-cycle `v1 .. v5` with chord path
/// `v1 z v5`. Vertex 0 is `v5`, vertices 1 to 4 are `v1 .. v4`, vertex 5 is
/// `z`, so the residual sizes of the reduction argument read `(3, 2, 2, 2, 2, 2)`.
pub fn s_theta() -> Graph {
    Graph::from_edges(6, &[(1, 2), (2, 3), (3, 4), (4, 0), (0, 1), (5, 1), (5, 0)])
        .expect("theta graph")
}

pub const S_THETA_SIZES: [usize; 6] = [3, 2, 2, 2, 2, 2];

/// Searches every normalized maximum matching assignment for lists
/// `{0..sizes[v]}` and returns the first one whose cover has no transversal.
/// `budget` caps the total work (one unit per assignment plus solver nodes).
pub fn find_hard_assignment(
    g: &Graph,
    sizes: &[usize],
    budget: u64,
) -> Result<HardSearch, BudgetExceeded> {
    find_hard_assignment_with(g, sizes, budget, Execution::default())
}

/// [`find_hard_assignment`] with an explicit execution mode; the result is
/// the same in both modes unless the budget runs out.
pub fn find_hard_assignment_with(
    g: &Graph,
    sizes: &[usize],
    budget: u64,
    exec: Execution,
) -> Result<HardSearch, BudgetExceeded> {
    let space = AssignmentSpace::new(g, sizes);
    search_space(g, &space, budget, exec)
}

pub(crate) fn search_space(
    g: &Graph,
    space: &AssignmentSpace,
    budget: u64,
    exec: Execution,
) -> Result<HardSearch, BudgetExceeded> {
    if space.size() > budget as u128 {
        return Err(BudgetExceeded { budget });
    }
    let spent = AtomicU64::new(0);
    let hit = par::find_first_with(exec, space.size() as u64, |i| {
        let m = space.decode(i);
        let cover = build_cover(g, space.lists(), &m).expect("space yields valid assignments");
        let remaining = budget.saturating_sub(spent.load(Ordering::Relaxed));
        match solve_with_budget(&cover, Some(remaining)) {
            Err(e) => Some(Err(e)),
            Ok(out) => {
                let total = spent.fetch_add(out.nodes() + 1, Ordering::Relaxed) + out.nodes() + 1;
                if total > budget {
                    Some(Err(BudgetExceeded { budget }))
                } else if out.is_feasible() {
                    None
                } else {
                    Some(Ok(m))
                }
            }
        }
    });
    let (witness_index, witness) = match hit {
        None => (None, None),
        Some((_, Err(_))) => return Err(BudgetExceeded { budget }),
        Some((i, Ok(m))) => (Some(i), Some(m)),
    };
    Ok(HardSearch {
        lists: space.lists().clone(),
        witness,
        witness_index,
        space_size: space.size(),
        work: spent.into_inner(),
    })
}
