//! Charges, the seven transfer rules, and the audit of final charges.

use std::collections::VecDeque;
use std::fmt;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use super::{classify_faces, Classification, FaceKind, FiveKind};
use crate::embedding::PlaneEmbedding;
use crate::graph::{check_class_membership, ClassViolation};
use crate::reducer::{degree4_sources, ReducibleConfig};

pub type Charge = Ratio<i64>;

/// Distance within which a reducible configuration accounts for a negative
/// final charge.
pub const DEFAULT_WITNESS_RADIUS: usize = 2;

fn ratio_str(r: &Charge) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn ser_charge<S: Serializer>(r: &Charge, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&ratio_str(r))
}

fn ser_charges<S: Serializer>(rs: &[Charge], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(rs.iter().map(ratio_str))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    R1,
    R2,
    R3,
    R4_1,
    R4_2,
    R4_3,
    R5,
    R6,
    R7,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::R1 => "R1",
            Rule::R2 => "R2",
            Rule::R3 => "R3",
            Rule::R4_1 => "R4.1",
            Rule::R4_2 => "R4.2",
            Rule::R4_3 => "R4.3",
            Rule::R5 => "R5",
            Rule::R6 => "R6",
            Rule::R7 => "R7",
        };
        f.write_str(s)
    }
}

impl Serialize for Rule {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Every transfer goes from a vertex to a face.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Transfer {
    pub rule: Rule,
    pub from: usize,
    pub to: usize,
    #[serde(serialize_with = "ser_charge")]
    pub amount: Charge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Element {
    Vertex(usize),
    Face(usize),
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Vertex(v) => write!(f, "v{v}"),
            Element::Face(x) => write!(f, "f{x}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChargeLedger {
    #[serde(serialize_with = "ser_charges")]
    pub vertex_initial: Vec<Charge>,
    #[serde(serialize_with = "ser_charges")]
    pub vertex_final: Vec<Charge>,
    #[serde(serialize_with = "ser_charges")]
    pub face_initial: Vec<Charge>,
    #[serde(serialize_with = "ser_charges")]
    pub face_final: Vec<Charge>,
    pub transfers: Vec<Transfer>,
    pub classification: Classification,
    /// Faces receiving from one vertex under both R4.3 and R7.
    pub double_payments: Vec<(usize, usize)>,
}

impl ChargeLedger {
    pub fn total_initial(&self) -> Charge {
        self.vertex_initial.iter().chain(&self.face_initial).sum()
    }

    pub fn total_final(&self) -> Charge {
        self.vertex_final.iter().chain(&self.face_final).sum()
    }

    pub fn is_conserved(&self) -> bool {
        self.total_initial() == self.total_final()
    }

    pub fn initial(&self, e: Element) -> Charge {
        match e {
            Element::Vertex(v) => self.vertex_initial[v],
            Element::Face(f) => self.face_initial[f],
        }
    }

    pub fn final_charge(&self, e: Element) -> Charge {
        match e {
            Element::Vertex(v) => self.vertex_final[v],
            Element::Face(f) => self.face_final[f],
        }
    }

    pub fn transfers_by(&self, rule: Rule) -> impl Iterator<Item = &Transfer> + '_ {
        self.transfers.iter().filter(move |t| t.rule == rule)
    }

    /// Indices of transfers whose endpoints are neither incident nor a
    /// source and one of its sinks.
    pub fn non_local_transfers(&self, emb: &PlaneEmbedding) -> Vec<usize> {
        let cls = &self.classification;
        self.transfers
            .iter()
            .enumerate()
            .filter(|(_, t)| match t.rule {
                Rule::R6 => !cls
                    .sources
                    .iter()
                    .any(|s| s.source == t.from && s.sink == t.to),
                _ => !emb.faces().corners(t.from).contains(&t.to),
            })
            .map(|(i, _)| i)
            .collect()
    }
}

fn r(n: i64, d: i64) -> Charge {
    Ratio::new(n, d)
}

/// Initial charges `2d(v) - 6` and `d(f) - 6`, then rules R1 to R7.
pub fn discharge(emb: &PlaneEmbedding) -> ChargeLedger {
    let g = emb.graph();
    let fs = emb.faces();
    let cls = classify_faces(emb);
    let n = g.vertex_count();
    let vertex_initial: Vec<Charge> = (0..n).map(|v| r(2 * g.degree(v) as i64 - 6, 1)).collect();
    let face_initial: Vec<Charge> = fs
        .faces()
        .iter()
        .map(|f| r(f.len() as i64 - 6, 1))
        .collect();
    let mut transfers = Vec::new();
    let mut give = |rule, from, to, amount| {
        transfers.push(Transfer {
            rule,
            from,
            to,
            amount,
        })
    };

    for v in 0..n {
        let d = g.degree(v);
        let corners = fs.corners(v);
        let count = |k: FaceKind| corners.iter().filter(|&&f| cls.kind(f) == k).count();
        let (t3, t4) = (count(FaceKind::Triangle), count(FaceKind::Quad));
        let is_five = |f: usize| matches!(cls.kind(f), FaceKind::Five(_));
        let special = cls.is_special_vertex(v);
        let on_bad = corners.iter().any(|&f| cls.is_five(f, FiveKind::Bad));

        if d >= 4 {
            for &f in corners {
                match cls.kind(f) {
                    FaceKind::Triangle => give(Rule::R1, v, f, r(1, 1)),
                    FaceKind::Quad => give(Rule::R2, v, f, r(1, 2)),
                    _ => {}
                }
            }
        }
        if d == 4 && t3 <= 1 {
            let amount = if t3 == 1 && t4 == 1 { r(1, 4) } else { r(1, 3) };
            for &f in corners.iter().filter(|&&f| is_five(f)) {
                give(Rule::R3, v, f, amount);
            }
        }
        if special {
            for &f in corners
                .iter()
                .filter(|&&f| cls.is_five(f, FiveKind::Special))
            {
                give(Rule::R4_1, v, f, r(1, 1));
            }
        }
        if special && d == 5 {
            for &f in corners.iter().filter(|&&f| cls.is_five(f, FiveKind::Bad)) {
                give(Rule::R4_2, v, f, r(2, 3));
            }
            for &f in corners.iter().filter(|&&f| cls.f5_via[f].contains(&v)) {
                give(Rule::R4_3, v, f, r(1, 3));
            }
        }
        if (d == 5 && !special) || d >= 6 {
            for &f in corners.iter().filter(|&&f| cls.is_five(f, FiveKind::Bad)) {
                give(Rule::R5, v, f, r(3, 4));
            }
        }
        let r7 = d >= 6 || (d == 5 && (!special || !on_bad));
        if r7 {
            for &f in corners {
                if is_five(f)
                    && !cls.is_five(f, FiveKind::Special)
                    && !cls.is_five(f, FiveKind::Bad)
                {
                    give(Rule::R7, v, f, r(1, 2));
                }
            }
        }
    }
    for s in &cls.sources {
        give(Rule::R6, s.source, s.sink, r(1, 5));
    }

    let mut vertex_final = vertex_initial.clone();
    let mut face_final = face_initial.clone();
    for t in &transfers {
        vertex_final[t.from] -= t.amount;
        face_final[t.to] += t.amount;
    }
    let mut double_payments: Vec<(usize, usize)> = transfers
        .iter()
        .filter(|t| t.rule == Rule::R4_3)
        .filter(|a| {
            transfers
                .iter()
                .any(|b| b.rule == Rule::R7 && b.from == a.from && b.to == a.to)
        })
        .map(|t| (t.from, t.to))
        .collect();
    double_payments.dedup();

    ChargeLedger {
        vertex_initial,
        vertex_final,
        face_initial,
        face_final,
        transfers,
        classification: cls,
        double_payments,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub config: ReducibleConfig,
    /// Graph distance from the element to the configuration.
    pub distance: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditItem {
    pub element: Element,
    /// Degree of a vertex or length of a face.
    pub size: usize,
    #[serde(serialize_with = "ser_charge")]
    pub initial: Charge,
    #[serde(serialize_with = "ser_charge")]
    pub final_charge: Charge,
    pub case: String,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub class_violation: Option<ClassViolation>,
    #[serde(serialize_with = "ser_charge")]
    pub total_initial: Charge,
    #[serde(serialize_with = "ser_charge")]
    pub total_final: Charge,
    pub conserved: bool,
    pub radius: usize,
    pub items: Vec<AuditItem>,
    pub negative: Vec<Element>,
    pub unwitnessed: Vec<Element>,
    pub non_simple_faces: Vec<usize>,
    pub double_payments: Vec<(usize, usize)>,
    pub non_local_transfers: usize,
}

impl AuditReport {
    pub fn ok(&self) -> bool {
        self.conserved && self.unwitnessed.is_empty() && self.non_local_transfers == 0
    }
}

fn vertex_case(d: usize) -> String {
    match d {
        0..=3 => "3- vertex".into(),
        4 => "Case 1".into(),
        5 => "Case 2".into(),
        6 => "Case 3".into(),
        7 => "Case 4".into(),
        _ => "Case 5".into(),
    }
}

fn face_case(emb: &PlaneEmbedding, f: usize) -> String {
    let g = emb.graph();
    let face = emb.faces().face(f);
    match face.len() {
        0..=2 => "short face".into(),
        3 => "3-face".into(),
        4 => "4-face".into(),
        5 => {
            let degs: Vec<usize> = face.boundary.iter().map(|&v| g.degree(v)).collect();
            let big = degs.iter().filter(|&&d| d >= 5).count();
            if degs.iter().any(|&d| d <= 3) {
                "5-face on a 3- vertex".into()
            } else if big == 0 {
                "Case 1".into()
            } else if big == 1 {
                "Case 2".into()
            } else {
                "Case 3".into()
            }
        }
        _ => "6+-face".into(),
    }
}

/// Checks every final charge. A negative element is accounted for when a
/// reducible configuration (a vertex of degree at most 3, or a degree-4
/// source of a small 5-face) lies within `radius` of it.
pub fn audit_claims(emb: &PlaneEmbedding, ledger: &ChargeLedger, radius: usize) -> AuditReport {
    let g = emb.graph();
    let n = g.vertex_count();
    let mut configs: Vec<ReducibleConfig> = (0..n)
        .filter(|&v| g.degree(v) <= 3)
        .map(|w| ReducibleConfig::LowDegreeVertex { w })
        .collect();
    configs.extend(
        degree4_sources(emb)
            .into_iter()
            .map(ReducibleConfig::SourceConfig),
    );

    // multi-source BFS; ties go to the earlier configuration
    let mut nearest: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut queue = VecDeque::new();
    for (i, c) in configs.iter().enumerate() {
        for v in c.vertices() {
            if nearest[v].is_none() {
                nearest[v] = Some((i, 0));
                queue.push_back(v);
            }
        }
    }
    while let Some(u) = queue.pop_front() {
        let (i, d) = nearest[u].unwrap();
        for &w in g.neighbors(u) {
            if nearest[w].is_none() {
                nearest[w] = Some((i, d + 1));
                queue.push_back(w);
            }
        }
    }
    let witness_at = |vs: &[usize]| {
        vs.iter()
            .filter_map(|&v| nearest[v])
            .min_by_key(|&(i, d)| (d, i))
            .filter(|&(_, d)| d <= radius)
            .map(|(i, d)| Witness {
                config: configs[i],
                distance: d,
            })
    };

    let mut items = Vec::new();
    for v in 0..n {
        let e = Element::Vertex(v);
        items.push(AuditItem {
            element: e,
            size: g.degree(v),
            initial: ledger.initial(e),
            final_charge: ledger.final_charge(e),
            case: vertex_case(g.degree(v)),
            witness: witness_at(&[v]),
        });
    }
    for (f, face) in emb.faces().faces().iter().enumerate() {
        let e = Element::Face(f);
        items.push(AuditItem {
            element: e,
            size: face.len(),
            initial: ledger.initial(e),
            final_charge: ledger.final_charge(e),
            case: face_case(emb, f),
            witness: witness_at(&face.boundary),
        });
    }
    let zero = Charge::from_integer(0);
    let negative: Vec<Element> = items
        .iter()
        .filter(|i| i.final_charge < zero)
        .map(|i| i.element)
        .collect();
    let unwitnessed = items
        .iter()
        .filter(|i| i.final_charge < zero && i.witness.is_none())
        .map(|i| i.element)
        .collect();
    AuditReport {
        class_violation: check_class_membership(g),
        total_initial: ledger.total_initial(),
        total_final: ledger.total_final(),
        conserved: ledger.is_conserved(),
        radius,
        items,
        negative,
        unwitnessed,
        non_simple_faces: ledger.classification.non_simple.clone(),
        double_payments: ledger.double_payments.clone(),
        non_local_transfers: ledger.non_local_transfers(emb).len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::standard;

    fn int(n: i64) -> Charge {
        Charge::from_integer(n)
    }

    #[test]
    fn initial_total_is_minus_twelve() {
        for emb in [
            standard::k4(),
            standard::cube(),
            standard::dodecahedron(),
            standard::icosahedron(),
            standard::wheel(7),
            standard::cycle(9),
            standard::medial(&standard::dodecahedron()),
        ] {
            let l = discharge(&emb);
            assert_eq!(l.total_initial(), int(-12));
            assert!(l.is_conserved());
            assert!(l.non_local_transfers(&emb).is_empty());
        }
    }

    #[test]
    fn dodecahedron_has_no_transfers() {
        let emb = standard::dodecahedron();
        let l = discharge(&emb);
        assert!(l.transfers.is_empty());
        assert!(l.face_final.iter().all(|&c| c == int(-1)));
        let a = audit_claims(&emb, &l, DEFAULT_WITNESS_RADIUS);
        assert_eq!(a.negative.len(), 12);
        assert!(a.ok());
        for item in a
            .items
            .iter()
            .filter(|i| matches!(i.element, Element::Face(_)))
        {
            assert_eq!(item.witness.as_ref().unwrap().distance, 0);
            assert!(matches!(
                item.witness.as_ref().unwrap().config,
                ReducibleConfig::LowDegreeVertex { .. }
            ));
        }
    }

    #[test]
    fn triangles_and_quads_end_at_zero() {
        // icosidodecahedron: 4-vertices on two triangles give 1 to each and
        // nothing else; small pentagons collect R6 from degree-4 sources
        let emb = standard::medial(&standard::dodecahedron());
        let l = discharge(&emb);
        let cls = &l.classification;
        for f in 0..emb.faces().len() {
            if cls.kind(f) == FaceKind::Triangle {
                assert_eq!(l.face_final[f], int(0));
            }
            if cls.is_five(f, FiveKind::Small) {
                assert_eq!(l.face_final[f], int(-1) + r(5, 5));
            }
        }
        // every vertex pays 2 to triangles and 1/5 twice as a source
        assert!(l.vertex_final.iter().all(|&c| c == r(-2, 5)));
        let a = audit_claims(&emb, &l, DEFAULT_WITNESS_RADIUS);
        assert!(a.ok());
        assert!(a.items.iter().filter(|i| i.final_charge < int(0)).all(|i| i
            .witness
            .as_ref()
            .unwrap()
            .distance
            == 0));
        assert_eq!(a.items[0].case, "Case 1");
    }

    #[test]
    fn cube_quads_receive_from_three_vertices_only() {
        // 3-vertices give nothing, so quads stay negative and are witnessed
        let emb = standard::cube();
        let l = discharge(&emb);
        assert!(l.transfers.is_empty());
        let a = audit_claims(&emb, &l, 0);
        assert!(a.ok());
    }

    #[test]
    fn four_regular_quads_reach_zero() {
        // the octahedron's medial has 4-faces from its vertices with four
        // half-unit payments each
        let emb = standard::medial(&standard::cube());
        let l = discharge(&emb);
        for (f, face) in emb.faces().faces().iter().enumerate() {
            if face.len() == 4 {
                assert_eq!(l.face_final[f], int(0));
                assert_eq!(
                    l.transfers
                        .iter()
                        .filter(|t| t.to == f && t.rule == Rule::R2)
                        .count(),
                    4
                );
            }
        }
    }

    #[test]
    fn rule_names() {
        assert_eq!(Rule::R4_3.to_string(), "R4.3");
        assert_eq!(ratio_str(&r(3, 4)), "3/4");
        assert_eq!(ratio_str(&int(-12)), "-12");
    }
}
