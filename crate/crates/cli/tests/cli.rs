use std::process::{Command, Output};

use tempfile::TempDir;

fn dpcolor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dpcolor"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const C4: &str = "0 1\n1 2\n2 3\n3 0\n";

// K4 drawn with vertex 3 inside triangle 0 1 2
const K4_EMBEDDING: &str = "n: 4\nrotation 0: [1, 3, 2]\nrotation 1: [2, 3, 0]\n\
                            rotation 2: [0, 3, 1]\nrotation 3: [0, 1, 2]\n";

#[test]
fn parse_summarizes_edge_lists() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "c4.txt", C4);
    let out = dpcolor(&["parse", &f]);
    assert_eq!(code(&out), 0);
    let s = stdout(&out);
    assert!(s.contains("vertices 4\nedges 4\nmin degree 2\ndegeneracy 2"));
}

#[test]
fn malformed_and_missing_input_exit_2() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "bad.txt", "0 1\n1 x\n");
    let out = dpcolor(&["parse", &f]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    assert_eq!(code(&dpcolor(&["parse", "/nonexistent/file"])), 2);
    let c4 = write(&dir, "c4.txt", C4);
    assert_eq!(code(&dpcolor(&["faces", &c4])), 2);
}

#[test]
fn check_class_exit_codes() {
    let dir = TempDir::new().unwrap();
    let c4 = write(&dir, "c4.txt", C4);
    assert_eq!(code(&dpcolor(&["check-class", &c4])), 0);
    let k4 = write(&dir, "k4.txt", K4_EMBEDDING);
    let out = dpcolor(&["check-class", &k4]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).starts_with("not in class"));
}

#[test]
fn chi_dp_of_c4_with_witness_and_budget() {
    let dir = TempDir::new().unwrap();
    let c4 = write(&dir, "c4.txt", C4);
    let out = dpcolor(&["--format", "json", "chi-dp", &c4]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["chi"], 2);
    assert_eq!(v["chi_dp"], 3);
    assert_eq!(v["witness"]["k"], 2);
    assert_eq!(code(&dpcolor(&["--budget", "1", "chi-dp", &c4])), 3);
    assert_eq!(code(&dpcolor(&["chi-dp", "--kmax", "2", &c4])), 1);
}

#[test]
fn solve_reads_assignments_and_reports_infeasible() {
    let dir = TempDir::new().unwrap();
    let c4 = write(&dir, "c4.txt", C4);
    // one crossed edge on C4 with 2-lists leaves no transversal
    let hard = "list 0: [0, 1]\nlist 1: [0, 1]\nlist 2: [0, 1]\nlist 3: [0, 1]\n\
                edge 0 1: [(0, 0), (1, 1)]\nedge 1 2: [(0, 0), (1, 1)]\n\
                edge 2 3: [(0, 0), (1, 1)]\nedge 0 3: [(0, 1), (1, 0)]\n";
    let a = write(&dir, "hard.txt", hard);
    let out = dpcolor(&["solve", &c4, "--assignment", &a]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).starts_with("no transversal"));
    let easy = write(
        &dir,
        "easy.txt",
        &hard.replace("(0, 1), (1, 0)", "(0, 0), (1, 1)"),
    );
    let out = dpcolor(&["solve", &c4, "--assignment", &easy]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("transversal: 0="));
    assert_eq!(code(&dpcolor(&["solve", &c4])), 2);
}

#[test]
fn generate_color_and_audit_round_trip() {
    let dir = TempDir::new().unwrap();
    let out = dpcolor(&["--seed", "11", "generate", "--n", "25"]);
    assert_eq!(code(&out), 0);
    let g = write(&dir, "g.txt", &stdout(&out));
    assert_eq!(code(&dpcolor(&["check-class", &g])), 0);

    let out = dpcolor(&["--format", "json", "--seed", "3", "color", &g]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["transversal"]["colors"].as_array().unwrap().len(), 25);

    let out = dpcolor(&["audit", &g]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("total initial -12 final -12 conserved true"));
    // generated members have 2-vertices, hence negative charges
    assert_eq!(code(&dpcolor(&["--strict", "audit", &g])), 1);
}

#[test]
fn color_rejects_non_members() {
    let dir = TempDir::new().unwrap();
    let k4 = write(&dir, "k4.txt", K4_EMBEDDING);
    let out = dpcolor(&["color", &k4]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("4-cycle"));
}

#[test]
fn fuzz_is_deterministic_and_budget_zero_exits_3() {
    let args = [
        "--seed",
        "9",
        "fuzz",
        "--trials",
        "6",
        "--assignments",
        "2",
        "--n-max",
        "20",
    ];
    let a = dpcolor(&args);
    let b = dpcolor(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("summary: graphs=6 runs=12 colored=12"));
    let out = dpcolor(&["--budget", "0", "fuzz", "--trials", "2"]);
    assert_eq!(code(&out), 3);
    assert_eq!(code(&dpcolor(&["fuzz", "--n-min", "2"])), 2);
}

#[test]
fn bundles_replay_through_color() {
    let dir = TempDir::new().unwrap();
    let out = dpcolor(&["--seed", "2", "generate", "--n", "15"]);
    let mut bundle = stdout(&out);
    bundle.push_str(
        &(0..15)
            .map(|v| format!("list {v}: [0, 1, 2, 3]\n"))
            .collect::<String>(),
    );
    let b = write(&dir, "bundle.txt", &bundle);
    let out = dpcolor(&["color", &b]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).starts_with("colors: "));
}

#[test]
fn regress_passes_and_filters() {
    let out = dpcolor(&["regress"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("8/8 passed"));
    let out = dpcolor(&["regress", "--filter", "nothing-matches"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "0/0 passed\n");
}
