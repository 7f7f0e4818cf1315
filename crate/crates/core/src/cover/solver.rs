//! Exact backtracking search for an independent transversal of a cover.
//!
//! Vertices are branched on in minimum-residual-first order (ties to the
//! lowest id). Before each branch, any uncolored vertex whose residual list is
//! longer than its number of still-active neighbors is deferred: whatever
//! happens to those neighbors, it keeps a color, so deferred vertices are
//! colored greedily at the end in reverse deferral order.

use thiserror::Error;

use super::{CoverGraph, Transversal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("solver budget of {budget} nodes exhausted")]
pub struct BudgetExceeded {
    pub budget: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Found {
        transversal: Transversal,
        nodes: u64,
    },
    /// No transversal exists; established by exhaustive search.
    Infeasible { nodes: u64 },
}

impl SolveOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, SolveOutcome::Found { .. })
    }

    pub fn nodes(&self) -> u64 {
        match self {
            SolveOutcome::Found { nodes, .. } | SolveOutcome::Infeasible { nodes } => *nodes,
        }
    }

    pub fn transversal(&self) -> Option<&Transversal> {
        match self {
            SolveOutcome::Found { transversal, .. } => Some(transversal),
            SolveOutcome::Infeasible { .. } => None,
        }
    }
}

pub fn solve_transversal(cover: &CoverGraph) -> SolveOutcome {
    solve_with_budget(cover, None).expect("unbounded search cannot exceed its budget")
}

/// Like [`solve_transversal`], failing once more than `budget` branching
/// nodes have been explored.
pub fn solve_with_budget(
    cover: &CoverGraph,
    budget: Option<u64>,
) -> Result<SolveOutcome, BudgetExceeded> {
    let mut search = Search::new(cover, budget);
    let found = search.run()?;
    let nodes = search.nodes;
    Ok(match found {
        Some(idx) => {
            let colors = idx
                .iter()
                .enumerate()
                .map(|(v, &i)| cover.lists().list(v)[i as usize])
                .collect();
            SolveOutcome::Found {
                transversal: Transversal { colors },
                nodes,
            }
        }
        None => SolveOutcome::Infeasible { nodes },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Active,
    Deferred,
    Colored,
}

struct Search<'a> {
    cover: &'a CoverGraph,
    budget: Option<u64>,
    nodes: u64,
    // (vertex, index in its list) of every cover node
    node_at: Vec<(usize, u8)>,
    res: Vec<u64>,
    state: Vec<State>,
    chosen: Vec<u8>,
    active_deg: Vec<usize>,
    deferred: Vec<usize>,
    trail: Vec<(usize, u64)>,
}

impl<'a> Search<'a> {
    fn new(cover: &'a CoverGraph, budget: Option<u64>) -> Self {
        let g = cover.graph();
        let n = g.vertex_count();
        let node_at = (0..cover.node_count())
            .map(|id| {
                let (v, _) = cover.node(id);
                (v, (id - cover.fiber(v).start) as u8)
            })
            .collect();
        let res = (0..n)
            .map(|v| {
                let len = cover.lists().list(v).len();
                if len == 64 {
                    u64::MAX
                } else {
                    (1u64 << len) - 1
                }
            })
            .collect();
        Search {
            cover,
            budget,
            nodes: 0,
            node_at,
            res,
            state: vec![State::Active; n],
            chosen: vec![0; n],
            active_deg: (0..n).map(|v| g.degree(v)).collect(),
            deferred: Vec::new(),
            trail: Vec::new(),
        }
    }

    fn run(&mut self) -> Result<Option<Vec<u8>>, BudgetExceeded> {
        if self.branch()? {
            self.finish_deferred();
            Ok(Some(self.chosen.clone()))
        } else {
            Ok(None)
        }
    }

    fn peel(&mut self) {
        let g = self.cover.graph();
        loop {
            let mut changed = false;
            for v in 0..self.state.len() {
                if self.state[v] == State::Active
                    && self.res[v].count_ones() as usize > self.active_deg[v]
                {
                    self.state[v] = State::Deferred;
                    self.deferred.push(v);
                    for &w in g.neighbors(v) {
                        if self.state[w] == State::Active {
                            self.active_deg[w] -= 1;
                        }
                    }
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }

    fn unpeel(&mut self, mark: usize) {
        let g = self.cover.graph();
        while self.deferred.len() > mark {
            let v = self.deferred.pop().unwrap();
            self.state[v] = State::Active;
            for &w in g.neighbors(v) {
                if self.state[w] == State::Active {
                    self.active_deg[w] += 1;
                }
            }
        }
    }

    /// Colors `v` with list index `i`, pruning matched colors from the
    /// residuals of uncolored neighbors. Returns the trail mark for undo.
    fn assign(&mut self, v: usize, i: u8) -> usize {
        let mark = self.trail.len();
        self.state[v] = State::Colored;
        self.chosen[v] = i;
        for &w in self.cover.graph().neighbors(v) {
            if self.state[w] == State::Active {
                self.active_deg[w] -= 1;
            }
        }
        let id = self.cover.fiber(v).start + i as usize;
        for &other in self.cover.cross_neighbors(id) {
            let (u, j) = self.node_at[other];
            let bit = 1u64 << j;
            if self.state[u] != State::Colored && self.res[u] & bit != 0 {
                self.trail.push((u, self.res[u]));
                self.res[u] &= !bit;
            }
        }
        mark
    }

    fn unassign(&mut self, v: usize, mark: usize) {
        while self.trail.len() > mark {
            let (u, old) = self.trail.pop().unwrap();
            self.res[u] = old;
        }
        self.state[v] = State::Active;
        for &w in self.cover.graph().neighbors(v) {
            if self.state[w] == State::Active {
                self.active_deg[w] += 1;
            }
        }
    }

    fn branch(&mut self) -> Result<bool, BudgetExceeded> {
        let mark = self.deferred.len();
        self.peel();
        let pick = (0..self.state.len())
            .filter(|&v| self.state[v] == State::Active)
            .min_by_key(|&v| (self.res[v].count_ones(), v));
        let Some(v) = pick else {
            return Ok(true);
        };
        let mut options = self.res[v];
        while options != 0 {
            let i = options.trailing_zeros() as u8;
            options &= options - 1;
            self.nodes += 1;
            if let Some(budget) = self.budget {
                if self.nodes > budget {
                    return Err(BudgetExceeded { budget });
                }
            }
            let tmark = self.assign(v, i);
            if self.branch()? {
                return Ok(true);
            }
            self.unassign(v, tmark);
        }
        self.unpeel(mark);
        Ok(false)
    }

    fn finish_deferred(&mut self) {
        while let Some(v) = self.deferred.pop() {
            let options = self.res[v];
            assert!(options != 0, "deferred vertex {v} ran out of colors");
            self.assign(v, options.trailing_zeros() as u8);
        }
    }
}
