//! Exact chromatic, list-chromatic and DP-chromatic numbers of small graphs,
//! and greedy coloring along a degeneracy order.

use serde::Serialize;
use thiserror::Error;

use crate::adversary::find_hard_assignment;
use crate::cover::{
    build_cover, identity_assignment, solve_with_budget, BudgetExceeded, Color, CoverError,
    ListAssignment, MatchingAssignment, Transversal,
};
use crate::graph::Graph;

pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChromaticError {
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    #[error("value exceeds kmax = {k_max}")]
    Unresolved { k_max: usize },
    #[error("vertex {vertex} has {size} colors, degeneracy order needs {needed}")]
    ListTooShort {
        vertex: usize,
        size: usize,
        needed: usize,
    },
    #[error(transparent)]
    Cover(#[from] CoverError),
}

/// Witness that `chi_dp - 1` colors do not suffice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HardWitness {
    pub k: usize,
    pub lists: ListAssignment,
    pub assignment: MatchingAssignment,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChromaticReport {
    pub graph_id: String,
    pub vertices: usize,
    pub edges: usize,
    pub degeneracy: usize,
    pub chi: usize,
    pub chi_list: Option<usize>,
    pub chi_dp: usize,
    pub witness: Option<HardWitness>,
    pub work: u64,
}

impl ChromaticReport {
    /// `chi <= chi_list <= chi_dp <= degeneracy + 1`.
    pub fn is_consistent(&self) -> bool {
        let list = self.chi_list.unwrap_or(self.chi);
        self.chi <= list && list <= self.chi_dp && self.chi_dp <= self.degeneracy + 1
    }
}

/// Ordinary chromatic number by exact search with uniform lists.
pub fn chromatic_number(g: &Graph, budget: u64) -> Result<usize, ChromaticError> {
    let n = g.vertex_count();
    let mut remaining = budget;
    for k in 0..=n {
        if k == 0 {
            if n == 0 {
                return Ok(0);
            }
            continue;
        }
        let lists = ListAssignment::uniform(n, k);
        let cover = build_cover(g, &lists, &identity_assignment(g, &lists))?;
        let out = solve_with_budget(&cover, Some(remaining))?;
        remaining -= out.nodes();
        if out.is_feasible() {
            return Ok(k);
        }
    }
    unreachable!("n colors always suffice")
}

/// Smallest `k <= k_max` such that every matching assignment over uniform
/// `k`-lists has a transversal. The enumeration runs over normalized
/// assignments only.
pub fn dp_chromatic(
    g: &Graph,
    k_max: usize,
    budget: u64,
) -> Result<ChromaticReport, ChromaticError> {
    let n = g.vertex_count();
    let mut remaining = budget;
    let mut witness = None;
    let mut chi_dp = None;
    for k in 1..=k_max.min(crate::cover::MAX_LIST_LEN) {
        if n == 0 {
            chi_dp = Some(0);
            break;
        }
        let res = find_hard_assignment(g, &vec![k; n], remaining)?;
        remaining = remaining.saturating_sub(res.work);
        match res.witness {
            Some(m) => {
                witness = Some(HardWitness {
                    k,
                    lists: res.lists,
                    assignment: m,
                })
            }
            None => {
                chi_dp = Some(k);
                break;
            }
        }
    }
    let chi_dp = chi_dp.ok_or(ChromaticError::Unresolved { k_max })?;
    let chi = chromatic_number(g, remaining)?;
    Ok(ChromaticReport {
        graph_id: format!("n{}-m{}", n, g.edge_count()),
        vertices: n,
        edges: g.edge_count(),
        degeneracy: g.degeneracy(),
        chi,
        chi_list: None,
        chi_dp,
        witness,
        work: budget - remaining,
    })
}

/// Smallest `k <= k_max` such that `g` is colorable from every list
/// assignment with lists of size `k`. List systems are enumerated up to color
/// renaming: each vertex's list takes some already used colors plus the next
/// unused ones, so a palette of `k * n` colors is never exceeded.
pub fn list_chromatic(g: &Graph, k_max: usize, budget: u64) -> Result<usize, ChromaticError> {
    let n = g.vertex_count();
    if n == 0 {
        return Ok(0);
    }
    let mut work = 0u64;
    for k in 1..=k_max.min(crate::cover::MAX_LIST_LEN) {
        let mut lists = Vec::with_capacity(n);
        if all_list_systems_colorable(g, k, &mut lists, 0, budget, &mut work)? {
            return Ok(k);
        }
    }
    Err(ChromaticError::Unresolved { k_max })
}

fn all_list_systems_colorable(
    g: &Graph,
    k: usize,
    lists: &mut Vec<Vec<Color>>,
    used: usize,
    budget: u64,
    work: &mut u64,
) -> Result<bool, ChromaticError> {
    if lists.len() == g.vertex_count() {
        *work += 1;
        let la = ListAssignment::new(lists.clone())?;
        let cover = build_cover(g, &la, &identity_assignment(g, &la))?;
        let out = solve_with_budget(&cover, Some(budget.saturating_sub(*work)))?;
        *work += out.nodes();
        if *work > budget {
            return Err(BudgetExceeded { budget }.into());
        }
        return Ok(out.is_feasible());
    }
    for fresh in 0..=k {
        let old = k - fresh;
        if old > used {
            continue;
        }
        for subset in subsets(used, old) {
            let mut list: Vec<Color> = subset.iter().map(|&c| c as Color).collect();
            list.extend((used..used + fresh).map(|c| c as Color));
            lists.push(list);
            let ok = all_list_systems_colorable(g, k, lists, used + fresh, budget, work)?;
            lists.pop();
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
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
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Colors greedily in reverse degeneracy order. Each vertex then has at most
/// `degeneracy` colored neighbors, so `degeneracy + 1` colors always leave
/// one free.
pub fn degeneracy_coloring(
    g: &Graph,
    lists: &ListAssignment,
    m: &MatchingAssignment,
) -> Result<Transversal, ChromaticError> {
    let n = g.vertex_count();
    let (order, d) = g.degeneracy_order();
    for v in 0..n {
        let size = lists.list(v).len();
        if size < d + 1 {
            return Err(ChromaticError::ListTooShort {
                vertex: v,
                size,
                needed: d + 1,
            });
        }
    }
    let mut partial: Vec<Option<Color>> = vec![None; n];
    for &v in order.iter().rev() {
        let blocked: Vec<Color> = g
            .neighbors(v)
            .iter()
            .filter_map(|&u| partial[u].and_then(|cu| m.matched(u, cu, v)))
            .collect();
        let c = lists
            .list(v)
            .iter()
            .copied()
            .find(|c| !blocked.contains(c))
            .expect("degeneracy bound leaves a color");
        partial[v] = Some(c);
    }
    Ok(Transversal {
        colors: partial.into_iter().map(Option::unwrap).collect(),
    })
}
