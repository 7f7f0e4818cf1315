//! Constructive DP-4-coloring of planar graphs without 4-cycles adjacent to
//! triangles. A reducible configuration is found, deleted, the rest colored,
//! and the configuration colored back in.

use serde::Serialize;
use thiserror::Error;

use crate::cover::{
    build_cover, residual_lists, solve_with_budget, BudgetExceeded, Color, CoverError,
    ListAssignment, MatchingAssignment, PartialColoring, Transversal,
};
use crate::embedding::PlaneEmbedding;
use crate::graph::{check_class_membership, ClassViolation, Graph};

pub const DEFAULT_BASE_CASE: usize = 6;

/// A degree-4 source `z` of a small 5-face `[v1 v2 v3 v4 v5]`, where
/// `[z v1 v2]` is a triangular face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SourceConfig {
    pub z: usize,
    /// `v1..v5` in boundary order; `v1 v2` is the edge shared with the
    /// triangle and `v1 < v2`.
    pub face: [usize; 5],
}

impl SourceConfig {
    pub fn vertices(&self) -> [usize; 6] {
        let [v1, v2, v3, v4, v5] = self.face;
        [self.z, v1, v2, v3, v4, v5]
    }

    fn map(&self, f: impl Fn(usize) -> usize) -> SourceConfig {
        SourceConfig {
            z: f(self.z),
            face: self.face.map(f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ReducibleConfig {
    LowDegreeVertex { w: usize },
    SourceConfig(SourceConfig),
}

impl ReducibleConfig {
    pub fn vertices(&self) -> Vec<usize> {
        match self {
            ReducibleConfig::LowDegreeVertex { w } => vec![*w],
            ReducibleConfig::SourceConfig(c) => c.vertices().to_vec(),
        }
    }

    fn map(&self, f: impl Fn(usize) -> usize) -> ReducibleConfig {
        match *self {
            ReducibleConfig::LowDegreeVertex { w } => ReducibleConfig::LowDegreeVertex { w: f(w) },
            ReducibleConfig::SourceConfig(c) => ReducibleConfig::SourceConfig(c.map(f)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("graph has a 4-cycle {:?} sharing an edge with the triangle {:?}", .0.four_cycle, .0.triangle)]
    NotInClass(ClassViolation),
    #[error("vertex {vertex} has a list of size {size}, need at least {needed}")]
    ListTooShort {
        vertex: usize,
        size: usize,
        needed: usize,
    },
    #[error("vertex {vertex} has {colored} colored neighbors, at most 3 allowed")]
    TooManyColoredNeighbors { vertex: usize, colored: usize },
    #[error("residual list of vertex {vertex} has {size} colors, need {needed}")]
    ResidualTooShort {
        vertex: usize,
        size: usize,
        needed: usize,
    },
    #[error("no reducible configuration in a subgraph on {} vertices", .certificate.len())]
    NoReducible {
        /// Rotation system of the irreducible subgraph, in original ids.
        certificate: Vec<(usize, Vec<usize>)>,
    },
    #[error("base case on vertices {vertices:?} has no transversal")]
    BaseCaseInfeasible { vertices: Vec<usize> },
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    #[error(transparent)]
    Cover(#[from] CoverError),
}

/// All degree-4 sources of small 5-faces whose six vertices induce exactly
/// the five face edges and the two triangle edges, sorted.
pub fn source_configs(emb: &PlaneEmbedding) -> Vec<SourceConfig> {
    let g = emb.graph();
    degree4_sources(emb)
        .into_iter()
        .filter(|c| g.induced(&c.vertices()).edge_count() == 7)
        .collect()
}

/// All degree-4 sources of small 5-faces, sorted, without the condition on
/// extra edges among the six vertices.
pub fn degree4_sources(emb: &PlaneEmbedding) -> Vec<SourceConfig> {
    let g = emb.graph();
    let faces = emb.faces();
    let mut out = Vec::new();
    for (fid, f) in faces.faces().iter().enumerate() {
        if f.len() != 5 || !f.is_simple() || f.boundary.iter().any(|&v| g.degree(v) != 4) {
            continue;
        }
        for j in 0..5 {
            let t = faces.face(emb.across(fid, j));
            if t.len() != 3 {
                continue;
            }
            let (a, b) = f.edge(j);
            let z = t
                .boundary
                .iter()
                .copied()
                .find(|&x| x != a && x != b)
                .expect("triangle apex");
            if g.degree(z) != 4 || f.contains(z) {
                continue;
            }
            // walk the face from v1 through v2
            let pos = |x: usize| f.boundary.iter().position(|&y| y == x).unwrap();
            let (v1, v2) = (a.min(b), a.max(b));
            let (p1, p2) = (pos(v1), pos(v2));
            let step = if (p1 + 1) % 5 == p2 { 1 } else { 4 };
            let face: [usize; 5] = std::array::from_fn(|i| f.boundary[(p1 + step * i) % 5]);
            out.push(SourceConfig { z, face });
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Lowest-id vertex of degree at most 3, else the least source
/// configuration.
pub fn find_reducible(emb: &PlaneEmbedding) -> Option<ReducibleConfig> {
    let g = emb.graph();
    if let Some(w) = (0..g.vertex_count()).find(|&w| g.degree(w) <= 3) {
        return Some(ReducibleConfig::LowDegreeVertex { w });
    }
    source_configs(emb)
        .first()
        .copied()
        .map(ReducibleConfig::SourceConfig)
}

fn colored_neighbors(g: &Graph, partial: &[Option<Color>], v: usize) -> usize {
    g.neighbors(v)
        .iter()
        .filter(|&&u| partial[u].is_some())
        .count()
}

/// Colors `w` given that at most three of its neighbors are colored. Uses
/// the smallest surviving color.
pub fn extend_low_degree(
    g: &Graph,
    lists: &ListAssignment,
    m: &MatchingAssignment,
    partial: &mut PartialColoring,
    w: usize,
) -> Result<Color, ReduceError> {
    let size = lists.list(w).len();
    if size < 4 {
        return Err(ReduceError::ListTooShort {
            vertex: w,
            size,
            needed: 4,
        });
    }
    let colored = colored_neighbors(g, partial, w);
    if colored > 3 {
        return Err(ReduceError::TooManyColoredNeighbors { vertex: w, colored });
    }
    let residual = residual_lists(g, lists, m, partial)?;
    let c = residual[&w][0];
    partial[w] = Some(c);
    Ok(c)
}

/// Colors the six vertices of a source configuration: `v1` first with the
/// smallest color leaving `z` two options, then `v5, v4, v3, v2, z`
/// greedily.
pub fn extend_source_config(
    g: &Graph,
    lists: &ListAssignment,
    m: &MatchingAssignment,
    partial: &mut PartialColoring,
    cfg: &SourceConfig,
) -> Result<(), ReduceError> {
    let [v1, v2, v3, v4, v5] = cfg.face;
    let z = cfg.z;
    let residual = residual_lists(g, lists, m, partial)?;
    for (v, needed) in [(v1, 3), (v2, 3), (v3, 2), (v4, 2), (v5, 2), (z, 2)] {
        let size = residual.get(&v).map_or(0, Vec::len);
        if size < needed {
            return Err(ReduceError::ResidualTooShort {
                vertex: v,
                size,
                needed,
            });
        }
    }
    let z_list = &residual[&z];
    let c1 = residual[&v1]
        .iter()
        .copied()
        .find(|&c| match m.matched(v1, c, z) {
            Some(cz) if z_list.contains(&cz) => z_list.len() >= 3,
            _ => true,
        })
        .expect("at most two colors of v1 hit the residual list of z");
    partial[v1] = Some(c1);
    for v in [v5, v4, v3, v2, z] {
        let residual = residual_lists(g, lists, m, partial)?;
        match residual[&v].first() {
            Some(&c) => partial[v] = Some(c),
            None => {
                return Err(ReduceError::ResidualTooShort {
                    vertex: v,
                    size: 0,
                    needed: 1,
                })
            }
        }
    }
    Ok(())
}

/// A transversal together with the configurations removed, in removal
/// order and original vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Reduction {
    pub transversal: Transversal,
    pub trace: Vec<ReducibleConfig>,
    pub base: Vec<usize>,
}

pub fn color_class_graph(
    emb: &PlaneEmbedding,
    lists: &ListAssignment,
    m: &MatchingAssignment,
) -> Result<Transversal, ReduceError> {
    color_with_trace(emb, lists, m, DEFAULT_BASE_CASE).map(|r| r.transversal)
}

/// Deletes reducible configurations until at most `base_case` vertices
/// remain, solves the rest exactly, then extends in reverse order.
pub fn color_with_trace(
    emb: &PlaneEmbedding,
    lists: &ListAssignment,
    m: &MatchingAssignment,
    base_case: usize,
) -> Result<Reduction, ReduceError> {
    color_with_budget(emb, lists, m, base_case, None)
}

/// Like [`color_with_trace`], with a node budget for the exact base-case
/// search.
pub fn color_with_budget(
    emb: &PlaneEmbedding,
    lists: &ListAssignment,
    m: &MatchingAssignment,
    base_case: usize,
    budget: Option<u64>,
) -> Result<Reduction, ReduceError> {
    let g = emb.graph();
    if let Some(v) = check_class_membership(g) {
        return Err(ReduceError::NotInClass(v));
    }
    let n = g.vertex_count();
    if lists.len() != n {
        return Err(CoverError::WrongLength {
            expected: n,
            found: lists.len(),
        }
        .into());
    }
    for v in 0..n {
        let size = lists.list(v).len();
        if size < 4 {
            return Err(ReduceError::ListTooShort {
                vertex: v,
                size,
                needed: 4,
            });
        }
    }
    // validates the matchings against the graph and lists
    build_cover(g, lists, m)?;

    let mut current = emb.clone();
    let mut ids: Vec<usize> = (0..n).collect();
    let mut trace = Vec::new();
    while current.vertex_count() > base_case {
        let cfg = find_reducible(&current).ok_or_else(|| ReduceError::NoReducible {
            certificate: (0..current.vertex_count())
                .map(|v| {
                    (
                        ids[v],
                        current.rotation(v).iter().map(|&w| ids[w]).collect(),
                    )
                })
                .collect(),
        })?;
        let (next, keep) = current.remove_vertices(&cfg.vertices());
        trace.push(cfg.map(|v| ids[v]));
        ids = keep.iter().map(|&v| ids[v]).collect();
        current = next;
    }

    let base = ids;
    let mut partial: PartialColoring = vec![None; n];
    let sub_lists = ListAssignment::new(base.iter().map(|&v| lists.list(v).to_vec()).collect())?;
    let sub_m = m.restrict(&base);
    let cover = build_cover(current.graph(), &sub_lists, &sub_m)?;
    match solve_with_budget(&cover, budget)?.transversal() {
        Some(t) => {
            for (i, &v) in base.iter().enumerate() {
                partial[v] = Some(t.colors[i]);
            }
        }
        None => return Err(ReduceError::BaseCaseInfeasible { vertices: base }),
    }
    for cfg in trace.iter().rev() {
        match cfg {
            ReducibleConfig::LowDegreeVertex { w } => {
                extend_low_degree(g, lists, m, &mut partial, *w)?;
            }
            ReducibleConfig::SourceConfig(c) => extend_source_config(g, lists, m, &mut partial, c)?,
        }
    }
    let transversal = Transversal {
        colors: partial
            .into_iter()
            .map(|c| c.expect("every vertex colored"))
            .collect(),
    };
    build_cover(g, lists, m)?.verify(&transversal)?;
    Ok(Reduction {
        transversal,
        trace,
        base,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::identity_assignment;
    use crate::embedding::standard;
    use rand::{seq::SliceRandom, Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_full(g: &Graph, lists: &ListAssignment, rng: &mut ChaCha8Rng) -> MatchingAssignment {
        let mut m = MatchingAssignment::new();
        for (u, v) in g.edges() {
            let mut b = lists.list(v).to_vec();
            b.shuffle(rng);
            let pairs: Vec<_> = lists.list(u).iter().copied().zip(b).collect();
            m.set(u, v, &pairs).unwrap();
        }
        m
    }

    /// The six-vertex configuration on its own: z = 0, v1..v5 = 1..5.
    fn config_graph() -> (Graph, SourceConfig) {
        let g = Graph::from_edges(6, &[(1, 2), (2, 3), (3, 4), (4, 5), (5, 1), (0, 1), (0, 2)])
            .unwrap();
        (
            g,
            SourceConfig {
                z: 0,
                face: [1, 2, 3, 4, 5],
            },
        )
    }

    #[test]
    fn dodecahedron_reduces_by_low_degree() {
        let emb = standard::dodecahedron();
        assert_eq!(
            find_reducible(&emb),
            Some(ReducibleConfig::LowDegreeVertex { w: 0 })
        );
        let mut g_edges: Vec<_> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        g_edges.push((0, 5));
        let emb = PlaneEmbedding::new({
            let g = Graph::from_edges(6, &g_edges).unwrap();
            (0..6).map(|v| g.neighbors(v).to_vec()).collect()
        })
        .unwrap();
        assert_eq!(
            find_reducible(&emb),
            Some(ReducibleConfig::LowDegreeVertex { w: 0 })
        );
    }

    #[test]
    fn icosidodecahedron_has_source_configs() {
        let emb = standard::medial(&standard::dodecahedron());
        assert!(check_class_membership(emb.graph()).is_none());
        assert_eq!(emb.graph().min_degree(), Some(4));
        let cfgs = source_configs(&emb);
        // every pentagon has five adjacent triangles, each with a degree-4 apex
        assert_eq!(cfgs.len(), 60);
        match find_reducible(&emb) {
            Some(ReducibleConfig::SourceConfig(c)) => assert_eq!(c, cfgs[0]),
            other => panic!("expected a source configuration, got {other:?}"),
        }
        let g = emb.graph();
        for c in &cfgs {
            let [v1, v2, ..] = c.face;
            assert!(v1 < v2 && g.has_edge(c.z, v1) && g.has_edge(c.z, v2));
        }
    }

    #[test]
    fn low_degree_extension() {
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let lists = ListAssignment::uniform(4, 4);
        let m = identity_assignment(&g, &lists);
        let mut partial = vec![None, Some(0), Some(1), Some(2)];
        assert_eq!(extend_low_degree(&g, &lists, &m, &mut partial, 0), Ok(3));

        let mut partial = vec![None; 4];
        assert_eq!(extend_low_degree(&g, &lists, &m, &mut partial, 0), Ok(0));

        let short = ListAssignment::uniform(4, 3);
        let mut partial = vec![None; 4];
        assert!(matches!(
            extend_low_degree(
                &g,
                &short,
                &identity_assignment(&g, &short),
                &mut partial,
                0
            ),
            Err(ReduceError::ListTooShort { .. })
        ));
    }

    #[test]
    fn source_extension_with_empty_matchings() {
        let (g, cfg) = config_graph();
        let lists = ListAssignment::uniform(6, 4);
        let mut partial = vec![None; 6];
        extend_source_config(&g, &lists, &MatchingAssignment::new(), &mut partial, &cfg).unwrap();
        assert!(partial.iter().all(|c| *c == Some(0)));
    }

    #[test]
    fn source_extension_rejects_short_residuals() {
        let (g, cfg) = config_graph();
        let lists = ListAssignment::with_sizes(&[2, 2, 3, 2, 2, 2]);
        let mut partial = vec![None; 6];
        let err = extend_source_config(
            &g,
            &lists,
            &identity_assignment(&g, &lists),
            &mut partial,
            &cfg,
        );
        assert_eq!(
            err,
            Err(ReduceError::ResidualTooShort {
                vertex: 1,
                size: 2,
                needed: 3
            })
        );
    }

    #[test]
    fn source_extension_random_full_matchings() {
        let (g, cfg) = config_graph();
        // z, v1, v2, v3, v4, v5
        let lists = ListAssignment::with_sizes(&[2, 3, 3, 2, 2, 2]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10_000 {
            let mut m = MatchingAssignment::new();
            for (u, v) in g.edges() {
                let (a, b) = (lists.list(u).to_vec(), lists.list(v).to_vec());
                let (mut short, mut long, flip) = if a.len() <= b.len() {
                    (a, b, false)
                } else {
                    (b, a, true)
                };
                short.shuffle(&mut rng);
                long.shuffle(&mut rng);
                let pairs: Vec<_> = short
                    .into_iter()
                    .zip(long)
                    .map(|(x, y)| if flip { (y, x) } else { (x, y) })
                    .collect();
                m.set(u, v, &pairs).unwrap();
            }
            let mut partial = vec![None; 6];
            extend_source_config(&g, &lists, &m, &mut partial, &cfg).unwrap();
            let t = Transversal {
                colors: partial.into_iter().map(Option::unwrap).collect(),
            };
            build_cover(&g, &lists, &m).unwrap().verify(&t).unwrap();
        }
    }

    #[test]
    fn colors_class_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for emb in [
            standard::cycle(5),
            standard::dodecahedron(),
            standard::cube(),
            standard::medial(&standard::dodecahedron()),
        ] {
            let n = emb.vertex_count();
            let lists = ListAssignment::new(
                (0..n)
                    .map(|_| {
                        let mut p: Vec<Color> = (0..7).collect();
                        p.shuffle(&mut rng);
                        p.truncate(rng.gen_range(4..=5));
                        p
                    })
                    .collect(),
            )
            .unwrap();
            let m = random_full(emb.graph(), &lists, &mut rng);
            let r = color_with_trace(&emb, &lists, &m, DEFAULT_BASE_CASE).unwrap();
            build_cover(emb.graph(), &lists, &m)
                .unwrap()
                .verify(&r.transversal)
                .unwrap();
            assert!(r.base.len() <= DEFAULT_BASE_CASE);
        }
    }

    #[test]
    fn icosidodecahedron_uses_source_configs() {
        let emb = standard::medial(&standard::dodecahedron());
        let lists = ListAssignment::uniform(30, 4);
        let m = identity_assignment(emb.graph(), &lists);
        let r = color_with_trace(&emb, &lists, &m, DEFAULT_BASE_CASE).unwrap();
        assert!(matches!(r.trace[0], ReducibleConfig::SourceConfig(_)));
    }

    #[test]
    fn rejects_non_members() {
        let emb = standard::icosahedron();
        let lists = ListAssignment::uniform(12, 4);
        let m = identity_assignment(emb.graph(), &lists);
        assert!(matches!(
            color_class_graph(&emb, &lists, &m),
            Err(ReduceError::NotInClass(_))
        ));
        let emb = standard::cycle(5);
        let lists = ListAssignment::uniform(5, 3);
        let m = identity_assignment(emb.graph(), &lists);
        assert!(matches!(
            color_class_graph(&emb, &lists, &m),
            Err(ReduceError::ListTooShort { .. })
        ));
    }
}
