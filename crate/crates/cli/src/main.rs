use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use dpcolor::chromatic::{dp_chromatic, ChromaticError, DEFAULT_BUDGET};
use dpcolor::cover::{
    build_cover, random_full_matching, solve_with_budget, CoverError, ListAssignment,
    MatchingAssignment, SolveOutcome,
};
use dpcolor::discharging::{
    audit_claims, check_structural_lemmas, classify_faces, discharge, DEFAULT_WITNESS_RADIUS,
};
use dpcolor::embedding::PlaneEmbedding;
use dpcolor::format::{
    parse_assignment, parse_embedding, write_assignment, write_embedding, FormatError,
};
use dpcolor::generate::{generate_class_member, GenerateError};
use dpcolor::graph::{check_class_membership, parse_graph, Graph, GraphError};
use dpcolor::harness::{fuzz_theorem, run_regressions, FuzzConfig, HarnessError};
use dpcolor::reducer::{color_with_budget, ReduceError, DEFAULT_BASE_CASE};

#[derive(Parser)]
#[command(
    name = "dpcolor",
    version,
    about = "DP-coloring tools for plane graphs without 4-cycles adjacent to triangles"
)]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Node budget for exact searches.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    /// audit: fail on any negative final charge, witnessed or not.
    /// fuzz: treat budget exhaustion as a failure.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Read a graph (edge list or embedding) and print a summary.
    Parse { file: PathBuf },
    /// List the faces of an embedding with their discharging class.
    Faces { file: PathBuf },
    /// Look for a 4-cycle sharing an edge with a triangle.
    CheckClass { file: PathBuf },
    /// Exact search for a DP-coloring under a list and matching assignment.
    Solve {
        file: PathBuf,
        /// Assignment file; defaults to the `list`/`edge` lines of FILE.
        #[arg(long)]
        assignment: Option<PathBuf>,
    },
    /// DP-chromatic number, with a hard cover for one color fewer.
    ChiDp {
        file: PathBuf,
        #[arg(long, default_value_t = 5)]
        kmax: usize,
    },
    /// Color a class member from 4-lists by reduction.
    Color {
        file: PathBuf,
        /// Assignment file; defaults to the `list`/`edge` lines of FILE, then
        /// to 4-lists with random full matchings from --seed.
        #[arg(long)]
        assignment: Option<PathBuf>,
    },
    /// Discharging ledger, negative-charge witnesses and structural lemmas.
    Audit {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_WITNESS_RADIUS)]
        radius: usize,
    },
    /// Print a random class member on N vertices.
    Generate {
        #[arg(long, default_value_t = 20)]
        n: usize,
    },
    /// Fuzz the 4-colorer and the audit over generated class members.
    Fuzz {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 20)]
        assignments: usize,
        #[arg(long, default_value_t = 3)]
        n_min: usize,
        #[arg(long, default_value_t = 40)]
        n_max: usize,
        /// Write one certificate bundle per failure into this directory.
        #[arg(long)]
        bundle_dir: Option<PathBuf>,
    },
    /// Run the pinned regression suite.
    Regress {
        /// Only cases whose name contains this text.
        #[arg(long)]
        filter: Option<String>,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Budget(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Budget(_) => 3,
            _ => 2,
        }
    }
}

/// Command result: text and JSON renderings and whether it is negative.
struct Output {
    text: String,
    json: Value,
    negative: bool,
}

impl Output {
    fn new(text: String, json: Value) -> Self {
        Output {
            text,
            json,
            negative: false,
        }
    }

    fn negative(mut self, negative: bool) -> Self {
        self.negative = negative;
        self
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn is_embedding(text: &str) -> bool {
    text.lines().any(|l| {
        let t = l.trim_start();
        t.starts_with("rotation") || t.starts_with("n:")
    })
}

fn has_assignment(text: &str) -> bool {
    text.lines().any(|l| l.trim_start().starts_with("list"))
}

fn load_graph(text: &str) -> Result<(Graph, Option<PlaneEmbedding>), CliError> {
    if is_embedding(text) {
        let emb = parse_embedding(text)?;
        Ok((emb.graph().clone(), Some(emb)))
    } else {
        Ok((parse_graph(text)?, None))
    }
}

fn load_embedding(text: &str) -> Result<PlaneEmbedding, CliError> {
    if !is_embedding(text) {
        return Err(CliError::Input(
            "this command needs an embedding file (`n:` and `rotation` lines)".into(),
        ));
    }
    Ok(parse_embedding(text)?)
}

fn load_assignment(
    text: &str,
    assignment: Option<&Path>,
    n: usize,
) -> Result<Option<(ListAssignment, MatchingAssignment)>, CliError> {
    match assignment {
        Some(p) => Ok(Some(parse_assignment(&read(p)?, n)?)),
        None if has_assignment(text) => Ok(Some(parse_assignment(text, n)?)),
        None => Ok(None),
    }
}

fn colors_line(colors: &[u32]) -> String {
    colors
        .iter()
        .enumerate()
        .map(|(v, c)| format!("{v}={c}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_parse(text: &str) -> Result<Output, CliError> {
    let (g, emb) = load_graph(text)?;
    let mut s = format!(
        "vertices {}\nedges {}\nmin degree {}\ndegeneracy {}\nconnected {}\n",
        g.vertex_count(),
        g.edge_count(),
        g.min_degree().unwrap_or(0),
        g.degeneracy(),
        g.is_connected()
    );
    if let Some(e) = &emb {
        writeln!(s, "faces {}", e.faces().len()).unwrap();
    }
    s.push_str(&g.to_edge_list());
    let json = json!({
        "vertices": g.vertex_count(),
        "edges": g.edges().collect::<Vec<_>>(),
        "min_degree": g.min_degree(),
        "degeneracy": g.degeneracy(),
        "connected": g.is_connected(),
        "faces": emb.as_ref().map(|e| e.faces().len()),
    });
    Ok(Output::new(s, json))
}

fn cmd_faces(text: &str) -> Result<Output, CliError> {
    let emb = load_embedding(text)?;
    let cls = classify_faces(&emb);
    let mut s = String::new();
    let mut rows = Vec::new();
    for (f, face) in emb.faces().faces().iter().enumerate() {
        writeln!(
            s,
            "face {f}: length {} {:?} {:?}",
            face.len(),
            cls.kinds[f],
            face.boundary
        )
        .unwrap();
        rows.push(json!({"face": f, "length": face.len(), "kind": cls.kinds[f], "boundary": face.boundary}));
    }
    for src in &cls.sources {
        writeln!(
            s,
            "source {} -> face {} via triangle {}",
            src.source, src.sink, src.triangle
        )
        .unwrap();
    }
    let json =
        json!({"faces": rows, "sources": cls.sources, "special_vertices": cls.special_vertices});
    Ok(Output::new(s, json))
}

fn cmd_check_class(text: &str) -> Result<Output, CliError> {
    let (g, _) = load_graph(text)?;
    Ok(match check_class_membership(&g) {
        None => Output::new("in class\n".into(), json!({"in_class": true})),
        Some(v) => Output::new(
            format!(
                "not in class: 4-cycle {:?} shares edge {:?} with triangle {:?}\n",
                v.four_cycle, v.shared_edge, v.triangle
            ),
            json!({"in_class": false, "violation": v}),
        )
        .negative(true),
    })
}

fn cmd_solve(cli: &Cli, text: &str, assignment: Option<&Path>) -> Result<Output, CliError> {
    let (g, _) = load_graph(text)?;
    let (lists, m) = load_assignment(text, assignment, g.vertex_count())?
        .ok_or_else(|| CliError::Input("no assignment: pass --assignment".into()))?;
    let cover = build_cover(&g, &lists, &m)?;
    let out =
        solve_with_budget(&cover, Some(cli.budget)).map_err(|e| CliError::Budget(e.to_string()))?;
    Ok(match out {
        SolveOutcome::Found { transversal, nodes } => Output::new(
            format!(
                "transversal: {}\nnodes {nodes}\n",
                colors_line(&transversal.colors)
            ),
            json!({"feasible": true, "colors": transversal.colors, "nodes": nodes}),
        ),
        SolveOutcome::Infeasible { nodes } => Output::new(
            format!("no transversal\nnodes {nodes}\n"),
            json!({"feasible": false, "nodes": nodes}),
        )
        .negative(true),
    })
}

fn cmd_chi_dp(cli: &Cli, text: &str, kmax: usize) -> Result<Output, CliError> {
    let (g, _) = load_graph(text)?;
    match dp_chromatic(&g, kmax, cli.budget) {
        Ok(r) => {
            let mut s = format!(
                "chi {}\nchi_dp {}\ndegeneracy {}\nwork {}\n",
                r.chi, r.chi_dp, r.degeneracy, r.work
            );
            if let Some(w) = &r.witness {
                writeln!(s, "hard cover with {}-lists:", w.k).unwrap();
                s.push_str(&write_assignment(&w.lists, &w.assignment));
            }
            Ok(Output::new(s, json!(r)))
        }
        Err(ChromaticError::Budget(e)) => Err(CliError::Budget(e.to_string())),
        Err(e @ ChromaticError::Unresolved { .. }) => Ok(Output::new(
            format!("{e}\n"),
            json!({"unresolved": true, "kmax": kmax}),
        )
        .negative(true)),
        Err(e) => Err(CliError::Input(e.to_string())),
    }
}

fn cmd_color(cli: &Cli, text: &str, assignment: Option<&Path>) -> Result<Output, CliError> {
    let emb = load_embedding(text)?;
    let n = emb.vertex_count();
    let (lists, m) = match load_assignment(text, assignment, n)? {
        Some(a) => a,
        None => {
            let lists = ListAssignment::uniform(n, 4);
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let m = random_full_matching(emb.graph(), &lists, &mut rng);
            (lists, m)
        }
    };
    match color_with_budget(&emb, &lists, &m, DEFAULT_BASE_CASE, Some(cli.budget)) {
        Ok(r) => {
            let mut s = format!("colors: {}\n", colors_line(&r.transversal.colors));
            for cfg in &r.trace {
                writeln!(s, "removed {:?}", cfg).unwrap();
            }
            writeln!(s, "base {:?}", r.base).unwrap();
            Ok(Output::new(s, json!(r)))
        }
        Err(ReduceError::Budget(e)) => Err(CliError::Budget(e.to_string())),
        Err(e @ (ReduceError::ListTooShort { .. } | ReduceError::Cover(_))) => {
            Err(CliError::Input(e.to_string()))
        }
        Err(e) => Ok(Output::new(format!("{e}\n"), json!({"error": e.to_string()})).negative(true)),
    }
}

fn cmd_audit(cli: &Cli, text: &str, radius: usize) -> Result<Output, CliError> {
    let emb = load_embedding(text)?;
    let ledger = discharge(&emb);
    let audit = audit_claims(&emb, &ledger, radius);
    let lemmas = check_structural_lemmas(&emb).ok();
    let mut s = String::new();
    for item in &audit.items {
        let witness = match &item.witness {
            Some(w) => format!(" witness {:?} at distance {}", w.config, w.distance),
            None => String::new(),
        };
        writeln!(
            s,
            "{} size {} initial {} final {} [{}]{witness}",
            item.element, item.size, item.initial, item.final_charge, item.case
        )
        .unwrap();
    }
    writeln!(
        s,
        "total initial {} final {} conserved {}",
        audit.total_initial, audit.total_final, audit.conserved
    )
    .unwrap();
    writeln!(
        s,
        "negative {} unwitnessed {} non-local transfers {}",
        audit.negative.len(),
        audit.unwitnessed.len(),
        audit.non_local_transfers
    )
    .unwrap();
    if let Some(v) = &audit.class_violation {
        writeln!(
            s,
            "not in class: 4-cycle {:?} and triangle {:?}",
            v.four_cycle, v.triangle
        )
        .unwrap();
    }
    match &lemmas {
        Some(l) => writeln!(
            s,
            "lemmas: {} vertices of degree 5+ checked, {} violations, {} excused",
            l.vertices_checked,
            l.violations.len(),
            l.excused.len()
        )
        .unwrap(),
        None => s.push_str("lemmas: skipped, graph not in class\n"),
    }
    let lemmas_ok = lemmas.as_ref().is_some_and(|l| l.ok());
    let negative = !audit.ok()
        || audit.class_violation.is_some()
        || !lemmas_ok
        || (cli.strict && !audit.negative.is_empty());
    Ok(Output::new(s, json!({"audit": audit, "lemmas": lemmas})).negative(negative))
}

fn cmd_generate(cli: &Cli, n: usize) -> Result<Output, CliError> {
    let emb = generate_class_member(cli.seed, n)?;
    let text = format!(
        "# class member, seed {} n {n}\n{}",
        cli.seed,
        write_embedding(&emb)
    );
    Ok(Output::new(text, json!({"rotation": emb.rotations()})))
}

fn cmd_fuzz(cli: &Cli, cfg: FuzzConfig, bundle_dir: Option<&Path>) -> Result<Output, CliError> {
    let report = fuzz_theorem(&cfg)?;
    if let Some(dir) = bundle_dir {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        for f in &report.failures {
            if let Some(b) = &f.bundle {
                let name = match f.assignment {
                    Some(a) => format!("trial-{}-assignment-{a}.txt", f.trial),
                    None => format!("trial-{}.txt", f.trial),
                };
                let path = dir.join(name);
                std::fs::write(&path, b).map_err(|source| CliError::Io { path, source })?;
            }
        }
    }
    if report.budget_only() && !cli.strict {
        return Err(CliError::Budget(report.to_text()));
    }
    let negative = !report.ok();
    Ok(Output::new(report.to_text(), json!(report)).negative(negative))
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Parse { file } => cmd_parse(&read(file)?),
        Command::Faces { file } => cmd_faces(&read(file)?),
        Command::CheckClass { file } => cmd_check_class(&read(file)?),
        Command::Solve { file, assignment } => cmd_solve(cli, &read(file)?, assignment.as_deref()),
        Command::ChiDp { file, kmax } => cmd_chi_dp(cli, &read(file)?, *kmax),
        Command::Color { file, assignment } => cmd_color(cli, &read(file)?, assignment.as_deref()),
        Command::Audit { file, radius } => cmd_audit(cli, &read(file)?, *radius),
        Command::Generate { n } => cmd_generate(cli, *n),
        Command::Fuzz {
            trials,
            assignments,
            n_min,
            n_max,
            bundle_dir,
        } => {
            let cfg = FuzzConfig {
                seed: cli.seed,
                n_min: *n_min,
                n_max: *n_max,
                trials: *trials,
                assignments_per_graph: *assignments,
                budget: cli.budget,
            };
            cmd_fuzz(cli, cfg, bundle_dir.as_deref())
        }
        Command::Regress { filter } => {
            let r = run_regressions(filter.as_deref());
            let negative = !r.ok();
            Ok(Output::new(r.to_text(), json!(r)).negative(negative))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            match cli.format {
                OutputFormat::Text => print!("{}", out.text),
                OutputFormat::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&out.json).expect("values serialize")
                ),
            }
            ExitCode::from(u8::from(out.negative))
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
