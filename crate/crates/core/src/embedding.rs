//! Plane embeddings given as rotation systems, and the faces they induce.
//!
//! A half-edge `v -> w` is addressed by `(v, i)` with `rotation[v][i] == w`.
//! Faces are traced with the rule "arrive at `v` from `u`, leave towards the
//! successor of `u` in the rotation at `v`", so the corner of `v` between
//! `rotation[v][i - 1]` and `rotation[v][i]` belongs to the face of the
//! half-edge `(v, i)`.

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, GraphError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbeddingError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("rotation at vertex {vertex} is not a permutation of its neighbors")]
    RotationMismatch { vertex: usize },
    #[error("rotation lists {u} around {v} but not {v} around {u}")]
    Asymmetric { u: usize, v: usize },
    #[error("component containing vertex {vertex} has V - E + F = {euler}, not 2")]
    NotPlanar { vertex: usize, euler: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Face {
    /// Tail vertices of the boundary walk in order; the walk closes from the
    /// last entry back to the first. Vertices repeat at cut vertices.
    pub boundary: Vec<usize>,
}

impl Face {
    pub fn len(&self) -> usize {
        self.boundary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boundary.is_empty()
    }

    /// Boundary edge `j` as the ordered pair (boundary[j], boundary[j + 1]).
    pub fn edge(&self, j: usize) -> (usize, usize) {
        (self.boundary[j], self.boundary[(j + 1) % self.len()])
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len()).map(|j| self.edge(j))
    }

    /// True when no vertex appears twice on the walk.
    pub fn is_simple(&self) -> bool {
        let mut seen = self.boundary.clone();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }

    pub fn contains(&self, v: usize) -> bool {
        self.boundary.contains(&v)
    }
}

/// Faces of an embedding together with the half-edge to face incidence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceSet {
    faces: Vec<Face>,
    // out_face[v][i] = face of half-edge v -> rotation[v][i]
    out_face: Vec<Vec<usize>>,
}

impl FaceSet {
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn face(&self, id: usize) -> &Face {
        &self.faces[id]
    }

    /// Face ids around `v` in rotation order, one per corner; a face that
    /// visits `v` several times appears once per visit.
    pub fn corners(&self, v: usize) -> &[usize] {
        &self.out_face[v]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaneEmbedding {
    graph: Graph,
    rotation: Vec<Vec<usize>>,
    faces: FaceSet,
}

impl PlaneEmbedding {
    /// Builds an embedding from rotations alone; the graph is the set of
    /// pairs listed in the rotations, which must be symmetric.
    pub fn new(rotation: Vec<Vec<usize>>) -> Result<Self, EmbeddingError> {
        let n = rotation.len();
        let mut edges = Vec::new();
        for (u, rot) in rotation.iter().enumerate() {
            for &v in rot {
                if v >= n {
                    return Err(GraphError::VertexOutOfRange {
                        line: 0,
                        vertex: v,
                        n,
                    }
                    .into());
                }
                if !rotation[v].contains(&u) {
                    return Err(EmbeddingError::Asymmetric { u, v });
                }
                if u <= v {
                    edges.push((u, v));
                }
            }
        }
        let graph = Graph::from_edges(n, &edges)?;
        Self::with_graph(graph, rotation)
    }

    pub fn with_graph(graph: Graph, rotation: Vec<Vec<usize>>) -> Result<Self, EmbeddingError> {
        if rotation.len() != graph.vertex_count() {
            return Err(EmbeddingError::RotationMismatch {
                vertex: rotation.len().min(graph.vertex_count()),
            });
        }
        for (v, rot) in rotation.iter().enumerate() {
            let mut sorted = rot.clone();
            sorted.sort_unstable();
            if sorted != graph.neighbors(v) {
                return Err(EmbeddingError::RotationMismatch { vertex: v });
            }
        }
        let faces = trace_faces(&rotation);
        let emb = PlaneEmbedding {
            graph,
            rotation,
            faces,
        };
        emb.check_euler()?;
        Ok(emb)
    }

    fn check_euler(&self) -> Result<(), EmbeddingError> {
        let comps = self.graph.components();
        let mut comp_of = vec![0; self.graph.vertex_count()];
        for (c, comp) in comps.iter().enumerate() {
            for &v in comp {
                comp_of[v] = c;
            }
        }
        let mut face_count = vec![0i64; comps.len()];
        for f in self.faces.faces() {
            face_count[comp_of[f.boundary[0]]] += 1;
        }
        for (c, comp) in comps.iter().enumerate() {
            let v = comp.len() as i64;
            if v == 1 {
                continue;
            }
            let e = comp.iter().map(|&x| self.graph.degree(x)).sum::<usize>() as i64 / 2;
            let euler = v - e + face_count[c];
            if euler != 2 {
                return Err(EmbeddingError::NotPlanar {
                    vertex: comp[0],
                    euler,
                });
            }
        }
        Ok(())
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn rotation(&self, v: usize) -> &[usize] {
        &self.rotation[v]
    }

    pub fn rotations(&self) -> &[Vec<usize>] {
        &self.rotation
    }

    pub fn faces(&self) -> &FaceSet {
        &self.faces
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    fn position(&self, v: usize, w: usize) -> usize {
        self.rotation[v]
            .iter()
            .position(|&x| x == w)
            .expect("w is a neighbor of v")
    }

    /// Face on the side of the half-edge `u -> w` used by the tracing rule.
    pub fn face_of_half_edge(&self, u: usize, w: usize) -> usize {
        self.faces.out_face[u][self.position(u, w)]
    }

    /// The face across boundary edge `j` of `face`.
    pub fn across(&self, face: usize, j: usize) -> usize {
        let (a, b) = self.faces.face(face).edge(j);
        self.face_of_half_edge(b, a)
    }

    /// Restriction to the vertices outside `remove`, compacted to ids
    /// `0..k`. Returns the new embedding and, for each new id, the old id.
    /// Deleting vertices from a plane embedding keeps it plane, so the
    /// result is revalidated only as a consistency check.
    pub fn remove_vertices(&self, remove: &[usize]) -> (PlaneEmbedding, Vec<usize>) {
        let n = self.vertex_count();
        let mut gone = vec![false; n];
        for &v in remove {
            gone[v] = true;
        }
        let keep: Vec<usize> = (0..n).filter(|&v| !gone[v]).collect();
        let mut index = vec![usize::MAX; n];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i;
        }
        let rotation: Vec<Vec<usize>> = keep
            .iter()
            .map(|&v| {
                self.rotation[v]
                    .iter()
                    .filter(|&&w| !gone[w])
                    .map(|&w| index[w])
                    .collect()
            })
            .collect();
        let graph = self.graph.induced(&keep);
        let emb = PlaneEmbedding::with_graph(graph, rotation)
            .expect("vertex deletion preserves a plane embedding");
        (emb, keep)
    }
}

fn trace_faces(rotation: &[Vec<usize>]) -> FaceSet {
    let n = rotation.len();
    let mut out_face: Vec<Vec<usize>> =
        rotation.iter().map(|r| vec![usize::MAX; r.len()]).collect();
    let mut faces = Vec::new();
    for v in 0..n {
        for i in 0..rotation[v].len() {
            if out_face[v][i] != usize::MAX {
                continue;
            }
            let id = faces.len();
            let mut boundary = Vec::new();
            let (mut cur, mut idx) = (v, i);
            while out_face[cur][idx] == usize::MAX {
                out_face[cur][idx] = id;
                boundary.push(cur);
                let next = rotation[cur][idx];
                let back = rotation[next]
                    .iter()
                    .position(|&x| x == cur)
                    .expect("symmetric rotation");
                let succ = (back + 1) % rotation[next].len();
                cur = next;
                idx = succ;
            }
            faces.push(Face { boundary });
        }
    }
    FaceSet { faces, out_face }
}

/// Faces of a validated embedding.
pub fn faces_from_rotation(emb: &PlaneEmbedding) -> &[Face] {
    emb.faces().faces()
}

/// A few fixed plane graphs used by tests, regressions and benchmarks.
pub mod standard {
    use super::PlaneEmbedding;

    pub fn cycle(n: usize) -> PlaneEmbedding {
        let rotation = (0..n).map(|i| vec![(i + n - 1) % n, (i + 1) % n]).collect();
        PlaneEmbedding::new(rotation).expect("cycle embeds")
    }

    pub fn k4() -> PlaneEmbedding {
        // outer triangle 0 1 2 counterclockwise, 3 in the middle
        PlaneEmbedding::new(vec![
            vec![1, 3, 2],
            vec![2, 3, 0],
            vec![0, 3, 1],
            vec![0, 1, 2],
        ])
        .expect("K4 embeds")
    }

    pub fn cube() -> PlaneEmbedding {
        // outer square 0 1 2 3, inner square 4 5 6 7 with i ~ i + 4
        let rotation = vec![
            vec![1, 4, 3],
            vec![2, 5, 0],
            vec![3, 6, 1],
            vec![0, 7, 2],
            vec![0, 5, 7],
            vec![1, 6, 4],
            vec![2, 7, 5],
            vec![3, 4, 6],
        ];
        PlaneEmbedding::new(rotation).expect("cube embeds")
    }

    /// Wheel with rim `0..rim` and hub `rim`.
    pub fn wheel(rim: usize) -> PlaneEmbedding {
        let mut rotation: Vec<Vec<usize>> = (0..rim)
            .map(|i| vec![(i + 1) % rim, rim, (i + rim - 1) % rim])
            .collect();
        rotation.push((0..rim).collect());
        PlaneEmbedding::new(rotation).expect("wheel embeds")
    }

    /// Dodecahedron: outer pentagon 0..5, middle ring 5..15, inner pentagon 15..20.
    pub fn dodecahedron() -> PlaneEmbedding {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, 5 + 2 * i));
            edges.push((15 + i, 15 + (i + 1) % 5));
            edges.push((15 + i, 5 + 2 * i + 1));
        }
        for j in 0..10 {
            edges.push((5 + j, 5 + (j + 1) % 10));
        }
        let coords: Vec<(f64, f64)> = (0..20)
            .map(|v| {
                let (r, k, step, off) = match v {
                    0..=4 => (3.0, v as f64, 5.0, 0.0),
                    5..=14 => (2.0, (v - 5) as f64, 10.0, 0.0),
                    _ => (1.0, (v - 15) as f64, 5.0, 0.5),
                };
                let a = std::f64::consts::TAU * (k + off) / step;
                (r * a.cos(), r * a.sin())
            })
            .collect();
        super::geometric::from_straight_line(20, &edges, &coords).expect("dodecahedron embeds")
    }

    /// Icosahedron, as the dual of the dodecahedron.
    pub fn icosahedron() -> PlaneEmbedding {
        dual(&dodecahedron())
    }

    /// Dual of an embedding whose dual is simple: one vertex per face, with
    /// the faces across its boundary edges as rotation.
    pub fn dual(emb: &PlaneEmbedding) -> PlaneEmbedding {
        let rotation = (0..emb.faces().len())
            .map(|f| {
                (0..emb.faces().face(f).len())
                    .map(|j| emb.across(f, j))
                    .collect()
            })
            .collect();
        PlaneEmbedding::new(rotation).expect("dual of a 3-connected plane graph embeds")
    }

    /// Truncation: every vertex of degree d becomes a d-cycle, one vertex
    /// per half-edge, joined across the original edges.
    pub fn truncate(emb: &PlaneEmbedding) -> PlaneEmbedding {
        let n = emb.vertex_count();
        let mut offset = vec![0; n + 1];
        for v in 0..n {
            offset[v + 1] = offset[v] + emb.rotation(v).len();
        }
        let id =
            |v: usize, u: usize| offset[v] + emb.rotation(v).iter().position(|&w| w == u).unwrap();
        let mut rotation = vec![Vec::new(); offset[n]];
        for v in 0..n {
            let rot = emb.rotation(v);
            let d = rot.len();
            for (p, &u) in rot.iter().enumerate() {
                let next = offset[v] + (p + 1) % d;
                let prev = offset[v] + (p + d - 1) % d;
                rotation[offset[v] + p] = vec![id(u, v), prev, next];
            }
        }
        PlaneEmbedding::new(rotation).expect("truncation embeds")
    }

    /// Medial graph of a plane graph: one vertex per edge, adjacent when the
    /// edges are consecutive around a face. 4-regular.
    pub fn medial(emb: &PlaneEmbedding) -> PlaneEmbedding {
        let edges: Vec<(usize, usize)> = emb.graph().edges().collect();
        let id = |a: usize, b: usize| edges.binary_search(&(a.min(b), a.max(b))).unwrap();
        let mut rotation = vec![Vec::new(); edges.len()];
        for (e, &(u, v)) in edges.iter().enumerate() {
            // around the midpoint of uv: the two rotation-neighbors of uv at v,
            // then the two at u, ordered so the result is a rotation system
            let at = |x: usize, y: usize| {
                let rot = emb.rotation(x);
                let p = rot.iter().position(|&w| w == y).unwrap();
                let d = rot.len();
                (id(x, rot[(p + d - 1) % d]), id(x, rot[(p + 1) % d]))
            };
            let (vp, vn) = at(v, u);
            let (up, un) = at(u, v);
            rotation[e] = vec![vn, vp, un, up];
        }
        PlaneEmbedding::new(rotation).expect("medial graph embeds")
    }
}

/// Rotation systems from straight-line drawings.
pub mod geometric {
    use super::{EmbeddingError, PlaneEmbedding};
    use crate::graph::Graph;

    pub fn rotation_from_coords(
        n: usize,
        edges: &[(usize, usize)],
        coords: &[(f64, f64)],
    ) -> Vec<Vec<usize>> {
        let mut nb = vec![Vec::new(); n];
        for &(u, v) in edges {
            nb[u].push(v);
            nb[v].push(u);
        }
        for (v, list) in nb.iter_mut().enumerate() {
            let (x0, y0) = coords[v];
            list.sort_by(|&a, &b| {
                let ta = (coords[a].1 - y0).atan2(coords[a].0 - x0);
                let tb = (coords[b].1 - y0).atan2(coords[b].0 - x0);
                ta.partial_cmp(&tb).unwrap()
            });
        }
        nb
    }

    pub fn from_straight_line(
        n: usize,
        edges: &[(usize, usize)],
        coords: &[(f64, f64)],
    ) -> Result<PlaneEmbedding, EmbeddingError> {
        let graph = Graph::from_edges(n, edges)?;
        PlaneEmbedding::with_graph(graph, rotation_from_coords(n, edges, coords))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lengths(emb: &PlaneEmbedding) -> Vec<usize> {
        let mut l: Vec<usize> = emb.faces().faces().iter().map(Face::len).collect();
        l.sort_unstable();
        l
    }

    #[test]
    fn triangle_has_two_faces() {
        let emb = standard::cycle(3);
        assert_eq!(lengths(&emb), vec![3, 3]);
        let flipped = PlaneEmbedding::new(vec![vec![2, 1], vec![0, 2], vec![1, 0]]).unwrap();
        assert_eq!(lengths(&flipped), vec![3, 3]);
    }

    #[test]
    fn truncation_counts() {
        let t = standard::truncate(&standard::icosahedron());
        assert_eq!(t.vertex_count(), 60);
        assert_eq!(t.graph().edge_count(), 90);
        let mut l = lengths(&t);
        l.dedup();
        assert_eq!(l, vec![5, 6]);
    }

    #[test]
    fn tetrahedron_and_cube() {
        assert_eq!(lengths(&standard::k4()), vec![3; 4]);
        assert_eq!(lengths(&standard::cube()), vec![4; 6]);
    }

    #[test]
    fn platonic_face_counts() {
        let d = standard::dodecahedron();
        assert_eq!(d.graph().edge_count(), 30);
        assert_eq!(lengths(&d), vec![5; 12]);
        let i = standard::icosahedron();
        assert_eq!(i.graph().edge_count(), 30);
        assert_eq!(lengths(&i), vec![3; 20]);
        let m = standard::medial(&d);
        assert_eq!(m.vertex_count(), 30);
        assert!((0..30).all(|v| m.graph().degree(v) == 4));
        let mut l = lengths(&m);
        l.dedup();
        assert_eq!(l, vec![3, 5]);
        assert_eq!(m.faces().len(), 32);
    }

    #[test]
    fn rejects_nonplanar_rotation() {
        // K4 with one rotation reversed traces a torus embedding
        let err = PlaneEmbedding::new(vec![
            vec![1, 2, 3],
            vec![2, 3, 0],
            vec![0, 3, 1],
            vec![0, 1, 2],
        ])
        .unwrap_err();
        assert!(matches!(err, EmbeddingError::NotPlanar { .. }));
    }

    #[test]
    fn rejects_inconsistent_rotation() {
        let g = Graph::cycle(3);
        let err =
            PlaneEmbedding::with_graph(g, vec![vec![1, 2], vec![0, 2], vec![1, 1]]).unwrap_err();
        assert_eq!(err, EmbeddingError::RotationMismatch { vertex: 2 });
        let err = PlaneEmbedding::new(vec![vec![1], vec![]]).unwrap_err();
        assert_eq!(err, EmbeddingError::Asymmetric { u: 0, v: 1 });
    }

    #[test]
    fn half_edges_partitioned_and_sum_is_twice_edges() {
        for emb in [
            standard::k4(),
            standard::cube(),
            standard::wheel(5),
            standard::dodecahedron(),
        ] {
            let total: usize = emb.faces().faces().iter().map(Face::len).sum();
            assert_eq!(total, 2 * emb.graph().edge_count());
            let mut seen = std::collections::HashSet::new();
            for f in emb.faces().faces() {
                for e in f.edges() {
                    assert!(seen.insert(e), "half-edge {e:?} traced twice");
                    assert!(emb.graph().has_edge(e.0, e.1));
                }
            }
        }
    }

    #[test]
    fn corners_follow_rotation() {
        let emb = standard::wheel(5);
        let hub = 5;
        let corners = emb.faces().corners(hub);
        assert_eq!(corners.len(), 5);
        for &f in corners {
            assert_eq!(emb.faces().face(f).len(), 3);
            assert!(emb.faces().face(f).contains(hub));
        }
        // consecutive corners share the edge to rotation[i]
        for i in 0..5 {
            let (a, b) = (corners[i], corners[(i + 1) % 5]);
            let w = emb.rotation(hub)[i];
            assert!(emb.faces().face(a).contains(w) && emb.faces().face(b).contains(w));
        }
    }

    #[test]
    fn tree_and_cut_vertex_faces() {
        // path 0-1-2: one face walking each edge twice
        let emb = PlaneEmbedding::new(vec![vec![1], vec![0, 2], vec![1]]).unwrap();
        assert_eq!(lengths(&emb), vec![4]);
        assert!(!emb.faces().face(0).is_simple());
        // two triangles sharing vertex 0 (bowtie)
        let emb = PlaneEmbedding::new(vec![
            vec![1, 2, 3, 4],
            vec![2, 0],
            vec![0, 1],
            vec![4, 0],
            vec![0, 3],
        ])
        .unwrap();
        assert_eq!(lengths(&emb), vec![3, 3, 6]);
    }

    #[test]
    fn deletion_keeps_embedding_valid() {
        let d = standard::dodecahedron();
        let (sub, keep) = d.remove_vertices(&[0, 7, 19]);
        assert_eq!(sub.vertex_count(), 17);
        assert_eq!(keep.len(), 17);
        let total: usize = sub.faces().faces().iter().map(Face::len).sum();
        assert_eq!(total, 2 * sub.graph().edge_count());
    }

    #[test]
    fn disconnected_components_each_satisfy_euler() {
        let emb = PlaneEmbedding::new(vec![
            vec![1, 2],
            vec![2, 0],
            vec![0, 1],
            vec![],
            vec![5],
            vec![4],
        ])
        .unwrap();
        assert_eq!(emb.faces().len(), 3);
    }
}
