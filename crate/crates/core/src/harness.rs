//! Fuzzing of the constructive 4-colorer and the discharging audit over
//! generated class members, and a pinned regression suite.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::adversary::{find_hard_assignment, s_theta, S_THETA_SIZES};
use crate::chromatic::{degeneracy_coloring, dp_chromatic, list_chromatic, DEFAULT_BUDGET};
use crate::cover::{
    build_cover, identity_assignment, random_full_matching, ListAssignment, MatchingAssignment,
};
use crate::discharging::{
    audit_claims, check_structural_lemmas, discharge, DEFAULT_WITNESS_RADIUS,
};
use crate::embedding::{standard, PlaneEmbedding};
use crate::format::{write_bundle, Bundle};
use crate::generate::{generate_class_member, min_degree_four_members};
use crate::graph::{check_class_membership, Graph};
use crate::par::{self, Execution};
use crate::reducer::{
    color_with_budget, find_reducible, source_configs, ReduceError, ReducibleConfig,
    DEFAULT_BASE_CASE,
};
use crate::signed::{signed_choosable_4, signed_conflict, SignedGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("n_min must be at least 3, got {0}")]
    NMinTooSmall(usize),
    #[error("empty vertex range {n_min}..={n_max}")]
    EmptyRange { n_min: usize, n_max: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FuzzConfig {
    pub seed: u64,
    pub n_min: usize,
    pub n_max: usize,
    pub trials: usize,
    pub assignments_per_graph: usize,
    /// Node cap for each exact base-case search.
    pub budget: u64,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            seed: 0,
            n_min: 3,
            n_max: 40,
            trials: 100,
            assignments_per_graph: 20,
            budget: DEFAULT_BUDGET,
        }
    }
}

impl FuzzConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.n_min < 3 {
            return Err(HarnessError::NMinTooSmall(self.n_min));
        }
        if self.n_min > self.n_max {
            return Err(HarnessError::EmptyRange {
                n_min: self.n_min,
                n_max: self.n_max,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FailureKind {
    Generate,
    NotInClass,
    NoReducible,
    Color,
    Budget,
    Verify,
    Conservation,
    Audit,
    Lemmas,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FuzzFailure {
    pub trial: usize,
    pub assignment: Option<usize>,
    pub kind: FailureKind,
    pub message: String,
    /// Replayable certificate; absent only when no graph was generated.
    pub bundle: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrialSummary {
    pub trial: usize,
    pub generator_seed: u64,
    pub n: usize,
    pub edges: usize,
    pub min_degree: usize,
    pub source_configs: usize,
    pub negative_elements: usize,
    pub runs: usize,
    pub colored: usize,
    pub low_degree_steps: usize,
    pub source_config_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FuzzReport {
    pub config: FuzzConfig,
    /// Set when the budget is zero; nothing runs.
    pub budget_exhausted: bool,
    pub graphs: usize,
    pub runs: usize,
    pub colored: usize,
    pub min_degree_four_graphs: usize,
    pub trials: Vec<TrialSummary>,
    pub failures: Vec<FuzzFailure>,
}

impl FuzzReport {
    pub fn ok(&self) -> bool {
        !self.budget_exhausted && self.failures.is_empty()
    }

    /// True when the only problems are budget exhaustion.
    pub fn budget_only(&self) -> bool {
        !self.ok() && self.failures.iter().all(|f| f.kind == FailureKind::Budget)
    }

    pub fn to_text(&self) -> String {
        let c = &self.config;
        let mut s = format!(
            "fuzz seed={} n={}..={} trials={} assignments={} budget={}\n",
            c.seed, c.n_min, c.n_max, c.trials, c.assignments_per_graph, c.budget
        );
        if self.budget_exhausted {
            s.push_str("budget exhausted before the first run\n");
            return s;
        }
        for t in &self.trials {
            writeln!(
                s,
                "trial {}: n={} m={} mindeg={} sources={} negative={} colored={}/{} steps=low:{} source:{}",
                t.trial,
                t.n,
                t.edges,
                t.min_degree,
                t.source_configs,
                t.negative_elements,
                t.colored,
                t.runs,
                t.low_degree_steps,
                t.source_config_steps
            )
            .unwrap();
        }
        for f in &self.failures {
            let at = f
                .assignment
                .map_or(String::new(), |a| format!(" assignment {a}"));
            writeln!(
                s,
                "FAILURE trial {}{at} {:?}: {}",
                f.trial, f.kind, f.message
            )
            .unwrap();
        }
        writeln!(
            s,
            "summary: graphs={} runs={} colored={} mindeg4={} failures={}",
            self.graphs,
            self.runs,
            self.colored,
            self.min_degree_four_graphs,
            self.failures.len()
        )
        .unwrap();
        s
    }
}

/// Everything the harness checks about one graph and one assignment.
/// Returns the number of each reduction step used.
pub fn check_run(
    emb: &PlaneEmbedding,
    lists: &ListAssignment,
    m: &MatchingAssignment,
    budget: Option<u64>,
) -> Result<(usize, usize), (FailureKind, String)> {
    let red = color_with_budget(emb, lists, m, DEFAULT_BASE_CASE, budget).map_err(|e| match e {
        ReduceError::Budget(b) => (FailureKind::Budget, b.to_string()),
        ReduceError::NoReducible { .. } => (FailureKind::NoReducible, e.to_string()),
        e => (FailureKind::Color, e.to_string()),
    })?;
    build_cover(emb.graph(), lists, m)
        .and_then(|c| c.verify(&red.transversal))
        .map_err(|e| (FailureKind::Verify, e.to_string()))?;
    let low = red
        .trace
        .iter()
        .filter(|c| matches!(c, ReducibleConfig::LowDegreeVertex { .. }))
        .count();
    Ok((low, red.trace.len() - low))
}

/// Graph-level checks: a reducible configuration when δ ≥ 4, conservation,
/// the witness audit and the structural lemmas.
pub fn check_graph(emb: &PlaneEmbedding) -> Result<usize, (FailureKind, String)> {
    let g = emb.graph();
    if let Some(v) = check_class_membership(g) {
        return Err((
            FailureKind::NotInClass,
            format!(
                "4-cycle {:?} shares an edge with triangle {:?}",
                v.four_cycle, v.triangle
            ),
        ));
    }
    if g.min_degree().unwrap_or(0) >= 4 && find_reducible(emb).is_none() {
        return Err((
            FailureKind::NoReducible,
            "minimum degree 4 and no reducible configuration".into(),
        ));
    }
    let ledger = discharge(emb);
    let twelve = num_rational::Ratio::from_integer(-12);
    if !ledger.is_conserved() || (g.is_connected() && ledger.total_initial() != twelve) {
        return Err((
            FailureKind::Conservation,
            format!(
                "initial {} final {}",
                ledger.total_initial(),
                ledger.total_final()
            ),
        ));
    }
    let audit = audit_claims(emb, &ledger, DEFAULT_WITNESS_RADIUS);
    if !audit.ok() {
        return Err((
            FailureKind::Audit,
            format!(
                "unwitnessed {:?}, non-local transfers {}",
                audit.unwitnessed, audit.non_local_transfers
            ),
        ));
    }
    let lemmas = check_structural_lemmas(emb).map_err(|e| (FailureKind::Lemmas, e.to_string()))?;
    if !lemmas.ok() {
        return Err((FailureKind::Lemmas, format!("{:?}", lemmas.violations)));
    }
    Ok(audit.negative.len())
}

fn bundle_text(
    emb: &PlaneEmbedding,
    lists: &ListAssignment,
    m: &MatchingAssignment,
    notes: Vec<String>,
) -> String {
    write_bundle(&Bundle {
        embedding: emb.clone(),
        lists: lists.clone(),
        matching: m.clone(),
        notes,
    })
}

fn run_trial(cfg: &FuzzConfig, trial: usize) -> (Option<TrialSummary>, Vec<FuzzFailure>) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(trial as u64);
    let n = rng.gen_range(cfg.n_min..=cfg.n_max);
    let generator_seed: u64 = rng.gen();
    let mut failures = Vec::new();
    let emb = match generate_class_member(generator_seed, n) {
        Ok(e) => e,
        Err(e) => {
            let f = FuzzFailure {
                trial,
                assignment: None,
                kind: FailureKind::Generate,
                message: e.to_string(),
                bundle: None,
            };
            return (None, vec![f]);
        }
    };
    let g = emb.graph();
    let lists = ListAssignment::uniform(n, 4);
    let note = |what: String| {
        vec![
            format!(
                "seed {} trial {trial} generator seed {generator_seed}",
                cfg.seed
            ),
            what,
        ]
    };

    let negative = match check_graph(&emb) {
        Ok(neg) => neg,
        Err((kind, message)) => {
            let bundle = bundle_text(
                &emb,
                &lists,
                &identity_assignment(g, &lists),
                note(message.clone()),
            );
            failures.push(FuzzFailure {
                trial,
                assignment: None,
                kind,
                message,
                bundle: Some(bundle),
            });
            0
        }
    };
    let mut summary = TrialSummary {
        trial,
        generator_seed,
        n,
        edges: g.edge_count(),
        min_degree: g.min_degree().unwrap_or(0),
        source_configs: source_configs(&emb).len(),
        negative_elements: negative,
        runs: 0,
        colored: 0,
        low_degree_steps: 0,
        source_config_steps: 0,
    };
    for a in 0..cfg.assignments_per_graph {
        let m = random_full_matching(g, &lists, &mut rng);
        summary.runs += 1;
        match check_run(&emb, &lists, &m, Some(cfg.budget)) {
            Ok((low, src)) => {
                summary.colored += 1;
                summary.low_degree_steps += low;
                summary.source_config_steps += src;
            }
            Err((kind, message)) => {
                let bundle =
                    bundle_text(&emb, &lists, &m, note(format!("assignment {a}: {message}")));
                failures.push(FuzzFailure {
                    trial,
                    assignment: Some(a),
                    kind,
                    message,
                    bundle: Some(bundle),
                });
            }
        }
    }
    (Some(summary), failures)
}

/// Runs the trials concurrently; the report is ordered by trial id and is
/// identical for identical configs.
pub fn fuzz_theorem(cfg: &FuzzConfig) -> Result<FuzzReport, HarnessError> {
    fuzz_theorem_with(cfg, Execution::default())
}

pub fn fuzz_theorem_with(cfg: &FuzzConfig, exec: Execution) -> Result<FuzzReport, HarnessError> {
    cfg.validate()?;
    let mut report = FuzzReport {
        config: cfg.clone(),
        budget_exhausted: cfg.budget == 0,
        graphs: 0,
        runs: 0,
        colored: 0,
        min_degree_four_graphs: 0,
        trials: Vec::new(),
        failures: Vec::new(),
    };
    if report.budget_exhausted {
        return Ok(report);
    }
    let ids: Vec<usize> = (0..cfg.trials).collect();
    for (summary, failures) in par::map_with(exec, &ids, |&t| run_trial(cfg, t)) {
        if let Some(s) = summary {
            report.graphs += 1;
            report.runs += s.runs;
            report.colored += s.colored;
            report.min_degree_four_graphs += usize::from(s.min_degree >= 4);
            report.trials.push(s);
        }
        report.failures.extend(failures);
    }
    Ok(report)
}

/// Replays a certificate bundle through the same checks as the fuzzer.
pub fn replay_bundle(b: &Bundle) -> Result<(), (FailureKind, String)> {
    check_graph(&b.embedding)?;
    check_run(&b.embedding, &b.lists, &b.matching, None).map(|_| ())
}

pub struct Regression {
    pub name: &'static str,
    pub expected: String,
    pub compute: fn() -> String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegressionOutcome {
    pub name: String,
    pub passed: bool,
    pub expected: String,
    pub actual: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegressionReport {
    pub outcomes: Vec<RegressionOutcome>,
}

impl RegressionReport {
    pub fn ok(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for o in &self.outcomes {
            if o.passed {
                writeln!(s, "PASS {}", o.name).unwrap();
            } else {
                writeln!(s, "FAIL {}\n  - {}\n  + {}", o.name, o.expected, o.actual).unwrap();
            }
        }
        let passed = self.outcomes.iter().filter(|o| o.passed).count();
        writeln!(s, "{passed}/{} passed", self.outcomes.len()).unwrap();
        s
    }
}

fn chi_dp(g: &Graph) -> usize {
    dp_chromatic(g, 5, DEFAULT_BUDGET)
        .map(|r| r.chi_dp)
        .unwrap_or(0)
}

fn cycles_dp() -> String {
    (3..=8)
        .map(|n| format!("C{n}:{}", chi_dp(&Graph::cycle(n))))
        .collect::<Vec<_>>()
        .join(" ")
}

fn c4_gap() -> String {
    let c4 = Graph::cycle(4);
    let chi_l = list_chromatic(&c4, 3, DEFAULT_BUDGET).map_or("?".to_string(), |k| k.to_string());
    format!("chi_list(C4)={chi_l} chi_dp(C4)={}", chi_dp(&c4))
}

fn k4_dp() -> String {
    format!("chi_dp(K4)={}", chi_dp(&Graph::complete(4)))
}

fn s_theta_hard() -> String {
    let g = s_theta();
    match find_hard_assignment(&g, &S_THETA_SIZES, DEFAULT_BUDGET) {
        Err(e) => e.to_string(),
        Ok(hs) => {
            let feasible = hs.witness.as_ref().map(|m| {
                build_cover(&g, &hs.lists, m)
                    .map(|c| crate::cover::solve_transversal(&c).is_feasible())
            });
            format!(
                "space={} witness_index={:?} transversal={:?}",
                hs.space_size, hs.witness_index, feasible
            )
        }
    }
}

fn audit_line(emb: &PlaneEmbedding) -> String {
    let ledger = discharge(emb);
    let a = audit_claims(emb, &ledger, DEFAULT_WITNESS_RADIUS);
    format!(
        "initial={} final={} negative={} unwitnessed={} ok={}",
        a.total_initial,
        a.total_final,
        a.negative.len(),
        a.unwitnessed.len(),
        a.ok()
    )
}

fn dodecahedron_audit() -> String {
    audit_line(&standard::dodecahedron())
}

fn icosidodecahedron() -> String {
    let emb = &min_degree_four_members()[0].1;
    format!("sources={} {}", source_configs(emb).len(), audit_line(emb))
}

fn degeneracy_dodecahedron() -> String {
    let emb = standard::dodecahedron();
    let g = emb.graph();
    let lists = ListAssignment::uniform(g.vertex_count(), 4);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let m = random_full_matching(g, &lists, &mut rng);
    format!(
        "degeneracy={} colored={}",
        g.degeneracy(),
        degeneracy_coloring(g, &lists, &m).is_ok()
    )
}

fn signed_smoke() -> String {
    let mut out = Vec::new();
    for (name, emb) in min_degree_four_members()
        .into_iter()
        .take(1)
        .chain([("C5", standard::cycle(5))])
    {
        for sign in [1, -1] {
            let sg = SignedGraph::uniform(emb.graph().clone(), sign).expect("uniform signs");
            let ok =
                signed_choosable_4(&emb, &sg, None).map(|c| signed_conflict(&sg, &c).is_none());
            out.push(format!(
                "{name}{}:{}",
                if sign > 0 { '+' } else { '-' },
                ok == Ok(true)
            ));
        }
    }
    out.join(" ")
}

pub fn regression_suite() -> Vec<Regression> {
    let r = |name, expected: &str, compute| Regression {
        name,
        expected: expected.to_string(),
        compute,
    };
    vec![
        r(
            "cycle-dp-chromatic",
            "C3:3 C4:3 C5:3 C6:3 C7:3 C8:3",
            cycles_dp,
        ),
        r("c4-list-vs-dp", "chi_list(C4)=2 chi_dp(C4)=3", c4_gap),
        r("k4-dp-chromatic", "chi_dp(K4)=4", k4_dp),
        r(
            "degeneracy-dodecahedron",
            "degeneracy=3 colored=true",
            degeneracy_dodecahedron,
        ),
        r(
            "s-theta-hard-cover",
            "space=108 witness_index=Some(22) transversal=Some(Ok(false))",
            s_theta_hard,
        ),
        r(
            "dodecahedron-audit",
            "initial=-12 final=-12 negative=12 unwitnessed=0 ok=true",
            dodecahedron_audit,
        ),
        r(
            "icosidodecahedron-audit",
            "sources=60 initial=-12 final=-12 negative=30 unwitnessed=0 ok=true",
            icosidodecahedron,
        ),
        r(
            "signed-smoke",
            "icosidodecahedron+:true icosidodecahedron-:true C5+:true C5-:true",
            signed_smoke,
        ),
    ]
}

/// Runs the cases whose name contains `filter` (all when `None`).
pub fn run_suite(suite: &[Regression], filter: Option<&str>) -> RegressionReport {
    let outcomes = suite
        .iter()
        .filter(|r| filter.is_none_or(|f| r.name.contains(f)))
        .map(|r| {
            let actual = (r.compute)();
            RegressionOutcome {
                name: r.name.to_string(),
                passed: actual == r.expected,
                expected: r.expected.clone(),
                actual,
            }
        })
        .collect();
    RegressionReport { outcomes }
}

pub fn run_regressions(filter: Option<&str>) -> RegressionReport {
    run_suite(&regression_suite(), filter)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> FuzzConfig {
        FuzzConfig {
            seed: 5,
            n_min: 3,
            n_max: 25,
            trials: 12,
            assignments_per_graph: 3,
            budget: DEFAULT_BUDGET,
        }
    }

    #[test]
    fn config_validation() {
        assert_eq!(
            FuzzConfig {
                n_min: 2,
                ..small()
            }
            .validate(),
            Err(HarnessError::NMinTooSmall(2))
        );
        assert!(matches!(
            FuzzConfig {
                n_min: 9,
                n_max: 8,
                ..small()
            }
            .validate(),
            Err(HarnessError::EmptyRange { .. })
        ));
        assert!(FuzzConfig::default().validate().is_ok());
    }

    #[test]
    fn small_fuzz_is_clean_and_deterministic() {
        let a = fuzz_theorem(&small()).unwrap();
        assert!(a.ok(), "{}", a.to_text());
        assert_eq!(a.runs, 36);
        assert_eq!(a.colored, 36);
        assert_eq!(
            a.trials.iter().map(|t| t.trial).collect::<Vec<_>>(),
            (0..12).collect::<Vec<_>>()
        );
        let b = fuzz_theorem_with(&small(), Execution::Sequential).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_text(), b.to_text());
    }

    #[test]
    fn zero_budget_reports_immediately() {
        let r = fuzz_theorem(&FuzzConfig {
            budget: 0,
            ..small()
        })
        .unwrap();
        assert!(r.budget_exhausted && r.trials.is_empty() && !r.ok());
        assert!(r.to_text().contains("budget exhausted"));
    }

    #[test]
    fn clean_bundle_replays() {
        let emb = generate_class_member(3, 20).unwrap();
        let lists = ListAssignment::uniform(20, 4);
        let m = random_full_matching(emb.graph(), &lists, &mut ChaCha8Rng::seed_from_u64(1));
        let b = crate::format::parse_bundle(&bundle_text(&emb, &lists, &m, vec![])).unwrap();
        assert_eq!(replay_bundle(&b), Ok(()));
    }

    #[test]
    fn failing_bundle_replays() {
        let emb = standard::icosahedron();
        let lists = ListAssignment::uniform(12, 4);
        let text = bundle_text(
            &emb,
            &lists,
            &identity_assignment(emb.graph(), &lists),
            vec!["k".into()],
        );
        let b = crate::format::parse_bundle(&text).unwrap();
        assert!(matches!(
            replay_bundle(&b),
            Err((FailureKind::NotInClass, _))
        ));
    }

    #[test]
    fn regressions_pass() {
        let r = run_regressions(None);
        assert!(r.ok(), "{}", r.to_text());
        assert_eq!(r.outcomes.len(), regression_suite().len());
    }

    #[test]
    fn corrupted_expectation_is_red() {
        let mut suite = regression_suite();
        suite.retain(|r| r.name == "k4-dp-chromatic");
        suite[0].expected = "chi_dp(K4)=3".into();
        let r = run_suite(&suite, None);
        assert!(!r.ok());
        assert!(r.to_text().contains("- chi_dp(K4)=3\n  + chi_dp(K4)=4"));
    }

    #[test]
    fn filters() {
        assert!(run_suite(&[], None).outcomes.is_empty());
        assert!(run_regressions(Some("no-such-case")).outcomes.is_empty());
        assert_eq!(run_regressions(Some("k4")).outcomes.len(), 1);
    }
}
