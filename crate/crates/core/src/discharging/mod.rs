//! Face classification and structural predicates for the discharging
//! argument, and the charge ledger built on top of them.
//!
//! Two faces are adjacent when they share an edge and normally adjacent when
//! they share exactly one. A vertex on a face boundary walk more than once
//! is counted once per visit.

mod ledger;

pub use ledger::{
    audit_claims, discharge, AuditItem, AuditReport, Charge, ChargeLedger, Element, Rule, Transfer,
    Witness, DEFAULT_WITNESS_RADIUS,
};

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::embedding::PlaneEmbedding;
use crate::graph::{check_class_membership, ClassViolation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DischargeError {
    #[error("graph has a 4-cycle {:?} sharing an edge with the triangle {:?}", .0.four_cycle, .0.triangle)]
    NotInClass(ClassViolation),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FiveKind {
    Special,
    Bad,
    F5,
    Small,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FaceKind {
    /// Boundary walk shorter than 3, from a tree-like component.
    Short,
    Triangle,
    Quad,
    Five(FiveKind),
    SixPlus,
}

/// `source` is the apex of the triangular face `triangle`, which shares an
/// edge with the small 5-face `sink`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SourceSink {
    pub source: usize,
    pub sink: usize,
    pub triangle: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub kinds: Vec<FaceKind>,
    pub sources: Vec<SourceSink>,
    /// 5+-vertices of special 5-faces.
    pub special_vertices: BTreeSet<usize>,
    /// For each F5 face, the special 5-vertices through which it qualifies.
    pub f5_via: Vec<Vec<usize>>,
    /// Faces whose boundary walk repeats a vertex.
    pub non_simple: Vec<usize>,
}

impl Classification {
    pub fn kind(&self, f: usize) -> FaceKind {
        self.kinds[f]
    }

    pub fn is_five(&self, f: usize, k: FiveKind) -> bool {
        self.kinds[f] == FaceKind::Five(k)
    }

    pub fn is_special_vertex(&self, v: usize) -> bool {
        self.special_vertices.contains(&v)
    }

    pub fn sinks_of(&self, v: usize) -> impl Iterator<Item = &SourceSink> + '_ {
        self.sources.iter().filter(move |s| s.source == v)
    }
}

/// Number of edges shared by faces `f` and `g`.
pub fn shared_edges(emb: &PlaneEmbedding, f: usize, g: usize) -> usize {
    (0..emb.faces().face(f).len())
        .filter(|&j| emb.across(f, j) == g)
        .count()
}

pub fn adjacent(emb: &PlaneEmbedding, f: usize, g: usize) -> bool {
    f != g && shared_edges(emb, f, g) >= 1
}

pub fn normally_adjacent(emb: &PlaneEmbedding, f: usize, g: usize) -> bool {
    f != g && shared_edges(emb, f, g) == 1
}

fn face_len(emb: &PlaneEmbedding, f: usize) -> usize {
    emb.faces().face(f).len()
}

/// For a simple (5+,4,4,4,4)-face, the position of its 5+-vertex.
fn big_vertex(emb: &PlaneEmbedding, f: usize) -> Option<usize> {
    let face = emb.faces().face(f);
    let g = emb.graph();
    if face.len() != 5 || !face.is_simple() {
        return None;
    }
    let big: Vec<usize> = (0..5)
        .filter(|&i| g.degree(face.boundary[i]) >= 5)
        .collect();
    let rest_four = (0..5)
        .filter(|i| !big.contains(i))
        .all(|i| g.degree(face.boundary[i]) == 4);
    (big.len() == 1 && rest_four).then(|| big[0])
}

#[allow(clippy::needless_range_loop)]
pub fn classify_faces(emb: &PlaneEmbedding) -> Classification {
    let g = emb.graph();
    let fs = emb.faces();
    let nf = fs.len();
    let mut kinds = vec![FaceKind::SixPlus; nf];
    let mut special_vertices = BTreeSet::new();
    let mut non_simple = Vec::new();

    for f in 0..nf {
        let face = fs.face(f);
        if !face.is_simple() {
            non_simple.push(f);
        }
        kinds[f] = match face.len() {
            0..=2 => FaceKind::Short,
            3 => FaceKind::Triangle,
            4 => FaceKind::Quad,
            5 => FaceKind::Five(FiveKind::Other),
            _ => FaceKind::SixPlus,
        };
    }

    // special and bad first; F5 depends on them
    for f in 0..nf {
        if face_len(emb, f) != 5 {
            continue;
        }
        let face = fs.face(f);
        if face.is_simple() && face.boundary.iter().all(|&v| g.degree(v) == 4) {
            kinds[f] = FaceKind::Five(FiveKind::Small);
            continue;
        }
        let Some(p) = big_vertex(emb, f) else {
            continue;
        };
        let non_tri: Vec<usize> = (0..5)
            .filter(|&j| face_len(emb, emb.across(f, j)) != 3)
            .collect();
        if non_tri.is_empty() {
            kinds[f] = FaceKind::Five(FiveKind::Special);
            special_vertices.insert(face.boundary[p]);
        } else if non_tri.len() == 1 {
            // the 4+-face must lie on one of the two edges at the 5+-vertex
            // (edge j runs from position j to j + 1)
            let j = non_tri[0];
            if j == p || (j + 1) % 5 == p {
                kinds[f] = FaceKind::Five(FiveKind::Bad);
            }
        }
    }

    let mut f5_via = vec![Vec::new(); nf];
    for f in 0..nf {
        if kinds[f] != FaceKind::Five(FiveKind::Other)
            && kinds[f] != FaceKind::Five(FiveKind::Small)
        {
            continue;
        }
        let face = fs.face(f);
        let mut via: Vec<usize> = face
            .boundary
            .iter()
            .copied()
            .filter(|&v| g.degree(v) == 5 && special_vertices.contains(&v))
            .filter(|&v| {
                fs.corners(v).iter().any(|&f2| {
                    kinds[f2] == FaceKind::Five(FiveKind::Bad) && normally_adjacent(emb, f, f2)
                })
            })
            .collect();
        via.sort_unstable();
        via.dedup();
        if !via.is_empty() {
            kinds[f] = FaceKind::Five(FiveKind::F5);
            f5_via[f] = via;
        }
    }

    let mut sources = Vec::new();
    for f in 0..nf {
        if kinds[f] != FaceKind::Five(FiveKind::Small) {
            continue;
        }
        for j in 0..5 {
            let t = emb.across(f, j);
            if face_len(emb, t) != 3 {
                continue;
            }
            let (a, b) = fs.face(f).edge(j);
            let apex = fs
                .face(t)
                .boundary
                .iter()
                .copied()
                .find(|&x| x != a && x != b)
                .expect("triangle apex");
            sources.push(SourceSink {
                source: apex,
                sink: f,
                triangle: t,
            });
        }
    }
    sources.sort();
    sources.dedup();

    Classification {
        kinds,
        sources,
        special_vertices,
        f5_via,
        non_simple,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum LemmaViolation {
    /// A 5+-vertex on more than `floor(d/2)` triangular faces.
    TooManyTriangles {
        vertex: usize,
        triangles: usize,
        degree: usize,
    },
    /// A 5+-vertex on `t` triangles with `2t < d` and more than `t - 1`
    /// special 5-faces.
    TooManySpecialFaces {
        vertex: usize,
        triangles: usize,
        special: usize,
    },
    /// `vertex` is on the special or bad face `face` and the triangle
    /// `triangle` adjacent to it, and has a sink `sink` adjacent to
    /// `triangle`.
    SinkNextToTriangle {
        vertex: usize,
        face: usize,
        triangle: usize,
        sink: usize,
    },
    /// Two bad 5-faces normally adjacent along an edge at their common
    /// 5+-vertex.
    AdjacentBadFaces {
        vertex: usize,
        faces: (usize, usize),
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub vertices_checked: usize,
    pub violations: Vec<LemmaViolation>,
    /// Sink exclusions that fail only because the sink has a degree-4
    /// source, itself a reducible configuration.
    pub excused: Vec<LemmaViolation>,
}

impl LemmaReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_structural_lemmas(emb: &PlaneEmbedding) -> Result<LemmaReport, DischargeError> {
    if let Some(v) = check_class_membership(emb.graph()) {
        return Err(DischargeError::NotInClass(v));
    }
    let cls = classify_faces(emb);
    Ok(check_lemmas_with(emb, &cls))
}

pub(crate) fn check_lemmas_with(emb: &PlaneEmbedding, cls: &Classification) -> LemmaReport {
    let g = emb.graph();
    let fs = emb.faces();
    let mut violations = Vec::new();
    let mut excused = Vec::new();
    let mut checked = 0;
    for v in 0..g.vertex_count() {
        let d = g.degree(v);
        if d < 5 {
            continue;
        }
        checked += 1;
        let corners = fs.corners(v);
        let t = corners
            .iter()
            .filter(|&&f| cls.kind(f) == FaceKind::Triangle)
            .count();
        if t > d / 2 {
            violations.push(LemmaViolation::TooManyTriangles {
                vertex: v,
                triangles: t,
                degree: d,
            });
        }
        let special = corners
            .iter()
            .filter(|&&f| cls.is_five(f, FiveKind::Special))
            .count();
        if 2 * t < d && special > t.saturating_sub(1) {
            violations.push(LemmaViolation::TooManySpecialFaces {
                vertex: v,
                triangles: t,
                special,
            });
        }

        for &f1 in corners {
            if !(cls.is_five(f1, FiveKind::Special) || cls.is_five(f1, FiveKind::Bad)) {
                continue;
            }
            for &f2 in corners {
                if cls.kind(f2) != FaceKind::Triangle || !adjacent(emb, f1, f2) {
                    continue;
                }
                for s in cls.sinks_of(v) {
                    if adjacent(emb, s.sink, f2) {
                        let item = LemmaViolation::SinkNextToTriangle {
                            vertex: v,
                            face: f1,
                            triangle: f2,
                            sink: s.sink,
                        };
                        let has_small_source = cls
                            .sources
                            .iter()
                            .any(|o| o.sink == s.sink && g.degree(o.source) == 4);
                        if has_small_source {
                            excused.push(item);
                        } else {
                            violations.push(item);
                        }
                    }
                }
            }
        }

        for (i, &f1) in corners.iter().enumerate() {
            for &f2 in &corners[i + 1..] {
                if !cls.is_five(f1, FiveKind::Bad) || !cls.is_five(f2, FiveKind::Bad) {
                    continue;
                }
                if !normally_adjacent(emb, f1, f2) {
                    continue;
                }
                let face = fs.face(f1);
                let on_v = (0..face.len()).any(|j| {
                    let (a, b) = face.edge(j);
                    (a == v || b == v) && emb.across(f1, j) == f2
                });
                if on_v {
                    violations.push(LemmaViolation::AdjacentBadFaces {
                        vertex: v,
                        faces: (f1.min(f2), f1.max(f2)),
                    });
                }
            }
        }
    }
    violations.dedup();
    excused.dedup();
    LemmaReport {
        vertices_checked: checked,
        violations,
        excused,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::standard;

    /// Rotation system from a straight-line drawing.
    fn drawn(coords: &[(f64, f64)], edges: &[(usize, usize)]) -> PlaneEmbedding {
        crate::embedding::geometric::from_straight_line(coords.len(), edges, coords).unwrap()
    }

    #[test]
    fn icosidodecahedron_pentagons_are_small_with_five_sources() {
        let emb = standard::medial(&standard::dodecahedron());
        let cls = classify_faces(&emb);
        let fives: Vec<usize> = (0..emb.faces().len())
            .filter(|&f| cls.is_five(f, FiveKind::Small))
            .collect();
        assert_eq!(fives.len(), 12);
        assert_eq!(
            cls.kinds
                .iter()
                .filter(|&&k| k == FaceKind::Triangle)
                .count(),
            20
        );
        assert_eq!(cls.sources.len(), 60);
        assert!(cls.special_vertices.is_empty());
        let rep = check_structural_lemmas(&emb).unwrap();
        assert!(rep.ok());
        assert_eq!(rep.vertices_checked, 0);
    }

    #[test]
    fn dodecahedron_faces_are_other() {
        let emb = standard::dodecahedron();
        let cls = classify_faces(&emb);
        assert!(cls
            .kinds
            .iter()
            .all(|&k| k == FaceKind::Five(FiveKind::Other)));
        assert!(cls.sources.is_empty());
    }

    /// Pentagon 0..4 with a triangle on every edge, apex `5 + i` on edge
    /// `i, i + 1`, so the pentagon vertices have degree 4. `quad_on` replaces
    /// that edge's triangle by a 4-face through two new vertices, and `big`
    /// gives vertex 0 a fifth edge.
    fn flower(quad_on: Option<usize>, big: bool) -> PlaneEmbedding {
        use std::f64::consts::PI;
        let polar = |r: f64, deg: f64| (r * (deg * PI / 180.0).cos(), r * (deg * PI / 180.0).sin());
        let mut coords: Vec<(f64, f64)> = (0..5).map(|i| polar(1.0, 72.0 * i as f64)).collect();
        coords.extend((0..5).map(|i| polar(2.2, 72.0 * i as f64 + 36.0)));
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            if Some(i) != quad_on {
                edges.push((i, 5 + i));
                edges.push(((i + 1) % 5, 5 + i));
            }
        }
        if let Some(i) = quad_on {
            let (a, b) = (coords.len(), coords.len() + 1);
            coords.push(polar(2.0, 72.0 * i as f64 + 12.0));
            coords.push(polar(2.0, 72.0 * i as f64 + 60.0));
            edges.extend([(i, a), (a, b), (b, (i + 1) % 5)]);
        }
        if big {
            edges.push((0, coords.len()));
            coords.push(polar(1.8, -8.0));
        }
        drawn(&coords, &edges)
    }

    fn pentagon(emb: &PlaneEmbedding) -> usize {
        (0..emb.faces().len())
            .find(|&f| {
                let face = emb.faces().face(f);
                face.len() == 5 && face.boundary.iter().all(|&v| v < 5)
            })
            .unwrap()
    }

    #[test]
    fn pentagon_with_five_triangles_is_small() {
        let emb = flower(None, false);
        let cls = classify_faces(&emb);
        assert_eq!(cls.kind(pentagon(&emb)), FaceKind::Five(FiveKind::Small));
        assert_eq!(cls.sinks_of(5).count(), 1);
        assert_eq!(cls.sources.len(), 5);
    }

    #[test]
    fn special_face_and_vertex() {
        let emb = flower(None, true);
        assert_eq!(emb.graph().degree(0), 5);
        let cls = classify_faces(&emb);
        assert_eq!(cls.kind(pentagon(&emb)), FaceKind::Five(FiveKind::Special));
        assert_eq!(cls.special_vertices, BTreeSet::from([0]));
        assert!(cls.sources.is_empty());
    }

    #[test]
    fn bad_face_needs_the_big_face_at_the_big_vertex() {
        for (quad_on, expected) in [(0, FiveKind::Bad), (4, FiveKind::Bad), (2, FiveKind::Other)] {
            let emb = flower(Some(quad_on), true);
            let cls = classify_faces(&emb);
            assert_eq!(
                cls.kind(pentagon(&emb)),
                FaceKind::Five(expected),
                "quad on edge {quad_on}"
            );
        }
        let emb = flower(Some(0), false);
        assert_eq!(
            classify_faces(&emb).kind(pentagon(&emb)),
            FaceKind::Five(FiveKind::Small)
        );
    }

    #[test]
    fn refuses_non_members() {
        let emb = standard::k4();
        assert!(matches!(
            check_structural_lemmas(&emb),
            Err(DischargeError::NotInClass(_))
        ));
    }

    #[test]
    fn adjacency_counts() {
        let emb = standard::cube();
        assert_eq!(shared_edges(&emb, 0, 0), 0);
        let f0 = 0;
        let neighbors: Vec<usize> = (0..6).filter(|&g| adjacent(&emb, f0, g)).collect();
        assert_eq!(neighbors.len(), 4);
        assert!(neighbors.iter().all(|&g| normally_adjacent(&emb, f0, g)));
        // the two faces of a cycle share every edge
        let c = standard::cycle(5);
        assert_eq!(shared_edges(&c, 0, 1), 5);
        assert!(adjacent(&c, 0, 1) && !normally_adjacent(&c, 0, 1));
    }
}
