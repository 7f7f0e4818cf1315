//! Random plane graphs without 4-cycles adjacent to triangles.
//!
//! A random triangulation is grown by inserting vertices into faces and
//! flipping edges, all on the rotation system. Edges are then deleted from
//! 4-cycle/triangle pairs until none remain. The output distribution is not
//! uniform over the class.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::embedding::{standard, PlaneEmbedding};
use crate::graph::{check_class_membership, cycle_edges, Graph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("need at least 3 vertices, got {n}")]
    TooSmall { n: usize },
    #[error("no class member found for seed {seed} and n = {n}; try another seed")]
    Exhausted { seed: u64, n: usize },
}

const FLIPS_PER_VERTEX: usize = 2;
const ATTEMPTS: u64 = 8;

pub fn generate_class_member(seed: u64, n: usize) -> Result<PlaneEmbedding, GenerateError> {
    if n < 3 {
        return Err(GenerateError::TooSmall { n });
    }
    for attempt in 0..ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ attempt.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let mut rot = random_triangulation(n, &mut rng);
        if thin_to_class(&mut rot, &mut rng) {
            if let Ok(emb) = PlaneEmbedding::new(rot) {
                if check_class_membership(emb.graph()).is_none() {
                    return Ok(emb);
                }
            }
        }
    }
    Err(GenerateError::Exhausted { seed, n })
}

/// Fixed class members with minimum degree 4, which the random generator
/// essentially never produces: medial graphs of the dodecahedron and of the
/// truncated icosahedron.
pub fn min_degree_four_members() -> Vec<(&'static str, PlaneEmbedding)> {
    vec![
        (
            "icosidodecahedron",
            standard::medial(&standard::dodecahedron()),
        ),
        (
            "medial-truncated-icosahedron",
            standard::medial(&standard::truncate(&standard::icosahedron())),
        ),
    ]
}

fn pos(rot: &[usize], x: usize) -> usize {
    rot.iter().position(|&y| y == x).expect("neighbor present")
}

fn succ(rot: &[Vec<usize>], v: usize, u: usize) -> usize {
    let r = &rot[v];
    r[(pos(r, u) + 1) % r.len()]
}

/// Triangular faces as `(a, b, c)` walks, one per face.
fn triangles_of(rot: &[Vec<usize>]) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for a in 0..rot.len() {
        for &b in &rot[a] {
            let c = succ(rot, b, a);
            let back = succ(rot, c, b);
            // report each face once, from its smallest vertex
            if back == a && a < b && a < c {
                out.push((a, b, c));
            }
        }
    }
    out
}

/// Inserts vertex `v` into the face walk `a -> b -> c`.
fn insert_into_face(rot: &mut Vec<Vec<usize>>, (a, b, c): (usize, usize, usize)) {
    let v = rot.len();
    // at each corner x of the face reached from p, v goes right after p
    for (p, x) in [(a, b), (b, c), (c, a)] {
        let i = pos(&rot[x], p);
        rot[x].insert(i + 1, v);
    }
    rot.push(vec![b, a, c]);
}

/// Replaces edge `a b` by the other diagonal of its two triangles.
fn flip(rot: &mut [Vec<usize>], a: usize, b: usize) -> bool {
    let c = succ(rot, b, a);
    let d = succ(rot, a, b);
    if c == d || rot[c].contains(&d) || rot[a].len() <= 3 || rot[b].len() <= 3 {
        return false;
    }
    if succ(rot, c, b) != a || succ(rot, d, a) != b {
        return false;
    }
    let i = pos(&rot[a], b);
    rot[a].remove(i);
    let i = pos(&rot[b], a);
    rot[b].remove(i);
    let i = pos(&rot[c], b);
    rot[c].insert(i + 1, d);
    let i = pos(&rot[d], a);
    rot[d].insert(i + 1, c);
    true
}

fn random_triangulation(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let mut rot = vec![vec![2, 1], vec![0, 2], vec![1, 0]];
    while rot.len() < n {
        let faces = triangles_of(&rot);
        let f = *faces.choose(rng).expect("a triangulation has faces");
        insert_into_face(&mut rot, f);
    }
    for _ in 0..FLIPS_PER_VERTEX * n {
        let a = rng.gen_range(0..n);
        let b = *rot[a].choose(rng).unwrap();
        flip(&mut rot, a, b);
    }
    rot
}

fn graph_of(rot: &[Vec<usize>]) -> Graph {
    let edges: Vec<(usize, usize)> = (0..rot.len())
        .flat_map(|u| rot[u].iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
        .collect();
    Graph::from_edges(rot.len(), &edges).expect("rotation is a simple graph")
}

fn remove_edge(rot: &mut [Vec<usize>], u: usize, v: usize) {
    let i = pos(&rot[u], v);
    rot[u].remove(i);
    let i = pos(&rot[v], u);
    rot[v].remove(i);
}

fn is_biconnected_without(g: &Graph, skip: (usize, usize)) -> bool {
    let n = g.vertex_count();
    let reach = |cut: Option<usize>| {
        let start = (0..n).find(|&v| Some(v) != cut).unwrap();
        let mut seen = vec![false; n];
        let mut stack = vec![start];
        seen[start] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &w in g.neighbors(u) {
                if (u.min(w), u.max(w)) == skip || Some(w) == cut || seen[w] {
                    continue;
                }
                seen[w] = true;
                count += 1;
                stack.push(w);
            }
        }
        count == n - cut.map_or(0, |_| 1)
    };
    reach(None) && (0..n).all(|c| reach(Some(c)))
}

/// Deletes edges of violating 4-cycle/triangle pairs, preferring edges whose
/// endpoints have high degree and whose removal keeps the graph
/// 2-connected. Returns false if the graph falls apart.
fn thin_to_class(rot: &mut [Vec<usize>], rng: &mut ChaCha8Rng) -> bool {
    loop {
        let g = graph_of(rot);
        let Some(viol) = check_class_membership(&g) else {
            return true;
        };
        let mut cands: Vec<(usize, usize)> = cycle_edges(&viol.triangle)
            .chain(cycle_edges(&viol.four_cycle))
            .collect();
        cands.sort_unstable();
        cands.dedup();
        cands.shuffle(rng);
        let score = |&(u, v): &(usize, usize)| g.degree(u).min(g.degree(v));
        cands.sort_by_key(|e| std::cmp::Reverse(score(e)));
        let pick = cands
            .iter()
            .copied()
            .find(|&e| is_biconnected_without(&g, e))
            .or_else(|| {
                cands.iter().copied().find(|&(u, v)| {
                    let mut h = rot.to_vec();
                    remove_edge(&mut h, u, v);
                    graph_of(&h).is_connected()
                })
            });
        match pick {
            Some((u, v)) => remove_edge(rot, u, v),
            None => return false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangulation_is_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in [3, 4, 10, 40] {
            let rot = random_triangulation(n, &mut rng);
            let emb = PlaneEmbedding::new(rot).unwrap();
            assert_eq!(emb.graph().edge_count(), 3 * n - 6);
            assert!(emb.faces().faces().iter().all(|f| f.len() == 3));
        }
    }

    #[test]
    fn small_cases() {
        let emb = generate_class_member(1, 3).unwrap();
        assert_eq!(emb.graph().edge_count(), 3);
        assert_eq!(
            generate_class_member(1, 2),
            Err(GenerateError::TooSmall { n: 2 })
        );
        let emb = generate_class_member(7, 5).unwrap();
        assert!(check_class_membership(emb.graph()).is_none());
    }

    #[test]
    fn min_degree_four_supplement() {
        for (name, emb) in min_degree_four_members() {
            assert_eq!(emb.graph().min_degree(), Some(4), "{name}");
            assert!(check_class_membership(emb.graph()).is_none(), "{name}");
        }
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(
            generate_class_member(42, 30).unwrap(),
            generate_class_member(42, 30).unwrap()
        );
    }

    #[test]
    fn samples_are_connected_class_members() {
        for seed in 0..100 {
            let n = 3 + (seed as usize % 38);
            let emb = generate_class_member(seed, n).unwrap();
            assert_eq!(emb.vertex_count(), n);
            assert!(emb.graph().is_connected());
            assert!(check_class_membership(emb.graph()).is_none());
        }
    }
}
