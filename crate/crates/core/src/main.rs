//! Command-line driver: embed trees into prime-sum / coprime-sum graphs,
//! verify label assignments, run the small-n oracle, and report graph
//! statistics, all with stable JSON output.

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_traits::One;
use primegraph::embed::{embed_coprime, embed_prime, EmbedConfig, EmbedError, TargetKind};
use primegraph::graphs::{
    average_degree, check_bipartite_parity, dot_subgraph, estimate_average_degree, AmbientGraph,
    DEFAULT_EXHAUSTIVE_CAP,
};
use primegraph::numtheory::{NumTheoryError, PrimalityConfig};
use primegraph::tree::{
    canonical_form, enumerate_free_trees_with_cap, parse_tree, random_tree, Tree,
    DEFAULT_ENUMERATION_CAP,
};
use primegraph::verify::{find_induced, verify_induced, Violation, DEFAULT_ORACLE_CAP};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::PathBuf;
use std::process::ExitCode;

/// Bipartiteness is checked by pair scan; skipped above this n.
const BIPARTITE_SCAN_CAP: u64 = 20_000;
const SAMPLING_DEFAULT: u64 = 200_000;

#[derive(Parser)]
#[command(name = "primegraph", version, about = "Trees as induced subgraphs of prime-sum graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Embed a tree into a prime-sum or coprime-sum graph
    Embed(EmbedArgs),
    /// Verify a label assignment against a host graph
    Verify(VerifyArgs),
    /// Tabulate minimal witnesses and the universal-tree threshold M(n)
    Oracle(OracleArgs),
    /// Degree statistics and bipartiteness of a host graph
    Stats(StatsArgs),
    /// Generate a uniform random tree in edge-list format
    GenTree(GenTreeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    Prime,
    Coprime,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Prime,
    Coprime,
}

#[derive(Args)]
struct EmbedArgs {
    /// Tree file in edge-list format
    #[arg(long)]
    tree: PathBuf,
    #[arg(long, value_enum, default_value = "prime")]
    target: TargetArg,
    /// Root vertex for the BFS labeling order
    #[arg(long, default_value_t = 1)]
    root: usize,
    #[arg(long, default_value_t = 1)]
    start_multiplier: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Miller-Rabin rounds above the deterministic threshold
    #[arg(long, default_value_t = 64)]
    mr_rounds: u32,
    /// Cap on primality candidates per prime-search step
    #[arg(long)]
    budget: Option<u64>,
    /// Write a DOT rendering of the embedded subgraph here
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Write JSON here instead of stdout
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    tree: PathBuf,
    /// Comma-separated decimal labels, one per tree vertex
    #[arg(long)]
    labels: String,
    #[arg(long, value_enum, default_value = "prime")]
    target: TargetArg,
    /// Host graph size; defaults to the largest label
    #[arg(long)]
    n: Option<String>,
    /// Modulus for the coprime-sum host
    #[arg(long)]
    q: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 64)]
    mr_rounds: u32,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    n: u64,
    /// Largest tree size to tabulate
    #[arg(long, default_value_t = 8)]
    max_m: usize,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long)]
    n: u64,
    #[arg(long)]
    q: Option<u64>,
    /// Pair samples used when n exceeds the exhaustive cap
    #[arg(long, default_value_t = SAMPLING_DEFAULT)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct GenTreeArgs {
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the edge list here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

enum CliError {
    Input(String),
    VerificationFailed(String),
    BudgetExceeded(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::VerificationFailed(_) => 1,
            CliError::Input(_) => 2,
            CliError::BudgetExceeded(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::VerificationFailed(m) | CliError::BudgetExceeded(m) => m,
        }
    }
}

impl From<EmbedError> for CliError {
    fn from(e: EmbedError) -> CliError {
        match e {
            EmbedError::NumTheory(NumTheoryError::SearchBudgetExceeded(_)) => {
                CliError::BudgetExceeded(e.to_string())
            }
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Serialize)]
struct Manifest {
    subcommand: &'static str,
    version: &'static str,
    input_digest: Option<String>,
    config: serde_json::Value,
}

#[derive(Serialize)]
struct TraceStepOut {
    vertex: usize,
    parent: Option<usize>,
    prime: Option<String>,
}

#[derive(Serialize)]
struct EmbedOutput {
    manifest: Manifest,
    m: usize,
    d: usize,
    target: TargetKind,
    q: String,
    moduli: Vec<u64>,
    codes: Vec<Vec<i8>>,
    residues: Vec<String>,
    labels: Vec<String>,
    max_label: String,
    n: String,
    verified: bool,
    trace: Vec<TraceStepOut>,
}

#[derive(Serialize)]
struct ViolationOut {
    kind: &'static str,
    vertices: Option<(usize, usize)>,
    vertex: Option<usize>,
    label: Option<String>,
    expected_edge: Option<bool>,
    observed_edge: Option<bool>,
    sum: Option<String>,
    factor: Option<String>,
}

#[derive(Serialize)]
struct VerifyOutput {
    manifest: Manifest,
    m: usize,
    n: String,
    ok: bool,
    violations: Vec<ViolationOut>,
}

#[derive(Serialize)]
struct OracleTreeOut {
    m: usize,
    canonical: String,
    labels: Option<Vec<String>>,
}

#[derive(Serialize)]
struct OracleOutput {
    manifest: Manifest,
    n: u64,
    max_m: usize,
    /// Largest M <= max_m with every tree on at most M vertices embedded.
    m_universal: usize,
    trees: Vec<OracleTreeOut>,
}

#[derive(Serialize)]
struct StatsOutput {
    manifest: Manifest,
    kind: &'static str,
    n: u64,
    q: Option<u64>,
    exact: bool,
    edge_count: Option<u128>,
    average_degree: f64,
    std_error: Option<f64>,
    bipartite: Option<bool>,
}

fn read_tree(path: &PathBuf) -> Result<(Tree, String), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let tree = parse_tree(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let digest = format!("{:x}", Sha256::digest(text.as_bytes()));
    Ok((tree, digest))
}

fn write_output(json: &Option<PathBuf>, body: &str) -> Result<(), CliError> {
    match json {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{body}");
            Ok(())
        }
    }
}

fn to_json(value: &impl Serialize) -> String {
    serde_json::to_string_pretty(value).expect("serializable output")
}

fn violation_out(v: &Violation) -> ViolationOut {
    match v {
        Violation::DuplicateLabel { vertices, label } => ViolationOut {
            kind: "duplicate",
            vertices: Some(*vertices),
            vertex: None,
            label: Some(label.to_string()),
            expected_edge: None,
            observed_edge: None,
            sum: None,
            factor: None,
        },
        Violation::LabelOutOfRange { vertex, label } => ViolationOut {
            kind: "out_of_range",
            vertices: None,
            vertex: Some(*vertex),
            label: Some(label.to_string()),
            expected_edge: None,
            observed_edge: None,
            sum: None,
            factor: None,
        },
        Violation::AdjacencyMismatch {
            pair,
            expected_edge,
            observed_edge,
            sum,
            factor,
        } => ViolationOut {
            kind: "mismatch",
            vertices: Some(*pair),
            vertex: None,
            label: None,
            expected_edge: Some(*expected_edge),
            observed_edge: Some(*observed_edge),
            sum: Some(sum.to_string()),
            factor: factor.as_ref().map(BigUint::to_string),
        },
    }
}

fn cmd_embed(args: &EmbedArgs) -> Result<(), CliError> {
    let (tree, digest) = read_tree(&args.tree)?;
    let primality = PrimalityConfig {
        probabilistic_rounds: args.mr_rounds,
        rng_seed: args.seed,
        ..PrimalityConfig::default()
    };
    let cfg = EmbedConfig {
        root: args.root,
        start_multiplier: args.start_multiplier,
        primality: primality.clone(),
        candidate_budget: args.budget,
    };
    let embedding = match args.target {
        TargetArg::Prime => embed_prime(&tree, &cfg)?,
        TargetArg::Coprime => embed_coprime(&tree),
    };
    let host = match embedding.target {
        TargetKind::Prime => AmbientGraph::PrimeSum {
            n: embedding.ambient_n.clone(),
        },
        TargetKind::Coprime => AmbientGraph::CoprimeSum {
            n: embedding.ambient_n.clone(),
            q: embedding.q.clone(),
        },
    };
    let report = verify_induced(&tree, embedding.labels(), &host, &primality);
    if !report.ok {
        return Err(CliError::VerificationFailed(format!(
            "self-verification failed: {:?}",
            report.violations
        )));
    }

    let enc = primegraph::encode::encode_tree(&tree);
    let residues = primegraph::embed::assign_residues(&enc);
    let m = tree.vertex_count();
    let manifest = Manifest {
        subcommand: "embed",
        version: env!("CARGO_PKG_VERSION"),
        input_digest: Some(digest),
        config: serde_json::json!({
            "target": match args.target { TargetArg::Prime => "prime", TargetArg::Coprime => "coprime" },
            "root": args.root,
            "start_multiplier": args.start_multiplier,
            "seed": args.seed,
            "mr_rounds": args.mr_rounds,
            "budget": args.budget,
        }),
    };
    let out = EmbedOutput {
        manifest,
        m,
        d: enc.dimension(),
        target: embedding.target,
        q: embedding.q.to_string(),
        moduli: embedding.moduli.clone(),
        codes: (1..=m).map(|v| enc.code(v).to_vec()).collect(),
        residues: (1..=m).map(|v| residues.residue(v).to_string()).collect(),
        labels: embedding.labels().iter().map(BigUint::to_string).collect(),
        max_label: embedding.max_label.to_string(),
        n: embedding.ambient_n.to_string(),
        verified: true,
        trace: embedding
            .trace
            .iter()
            .map(|s| TraceStepOut {
                vertex: s.vertex,
                parent: s.parent,
                prime: s.prime.as_ref().map(BigUint::to_string),
            })
            .collect(),
    };
    if let Some(dot_path) = &args.dot {
        let verts: Vec<BigUint> = embedding.labels().to_vec();
        let names: Vec<String> = (1..=m)
            .map(|v| format!("{v}:{}", embedding.label(v)))
            .collect();
        let dot = dot_subgraph(&host, &verts, Some(&names))
            .map_err(|e| CliError::Input(e.to_string()))?;
        std::fs::write(dot_path, dot)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", dot_path.display())))?;
    }
    write_output(&args.json, &to_json(&out))
}

fn parse_biguint(text: &str, what: &str) -> Result<BigUint, CliError> {
    text.trim()
        .parse::<BigUint>()
        .map_err(|_| CliError::Input(format!("invalid {what}: {text:?}")))
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let (tree, digest) = read_tree(&args.tree)?;
    let labels: Vec<BigUint> = args
        .labels
        .split(',')
        .map(|part| parse_biguint(part, "label"))
        .collect::<Result<_, _>>()?;
    if labels.len() != tree.vertex_count() {
        return Err(CliError::Input(format!(
            "{} labels for a tree on {} vertices",
            labels.len(),
            tree.vertex_count()
        )));
    }
    let n = match &args.n {
        Some(text) => parse_biguint(text, "n")?,
        None => labels.iter().max().cloned().unwrap_or_else(BigUint::one),
    };
    let host = match args.target {
        TargetArg::Prime => AmbientGraph::PrimeSum { n: n.clone() },
        TargetArg::Coprime => {
            let q = args
                .q
                .as_ref()
                .ok_or_else(|| CliError::Input("coprime target requires --q".into()))?;
            AmbientGraph::CoprimeSum {
                n: n.clone(),
                q: parse_biguint(q, "q")?,
            }
        }
    };
    let primality = PrimalityConfig {
        probabilistic_rounds: args.mr_rounds,
        rng_seed: args.seed,
        ..PrimalityConfig::default()
    };
    let report = verify_induced(&tree, &labels, &host, &primality);
    let out = VerifyOutput {
        manifest: Manifest {
            subcommand: "verify",
            version: env!("CARGO_PKG_VERSION"),
            input_digest: Some(digest),
            config: serde_json::json!({
                "target": match args.target { TargetArg::Prime => "prime", TargetArg::Coprime => "coprime" },
                "n": n.to_string(),
                "q": args.q,
                "seed": args.seed,
                "mr_rounds": args.mr_rounds,
            }),
        },
        m: tree.vertex_count(),
        n: n.to_string(),
        ok: report.ok,
        violations: report.violations.iter().map(violation_out).collect(),
    };
    write_output(&args.json, &to_json(&out))?;
    if report.ok {
        Ok(())
    } else {
        Err(CliError::VerificationFailed(format!(
            "{} violation(s)",
            report.violations.len()
        )))
    }
}

fn cmd_oracle(args: &OracleArgs) -> Result<(), CliError> {
    if args.n > DEFAULT_ORACLE_CAP {
        return Err(CliError::Input(format!(
            "oracle cap is n <= {DEFAULT_ORACLE_CAP}"
        )));
    }
    if args.max_m > DEFAULT_ENUMERATION_CAP {
        return Err(CliError::Input(format!(
            "enumeration cap is m <= {DEFAULT_ENUMERATION_CAP}"
        )));
    }
    let host = AmbientGraph::prime_sum(args.n);
    let mut trees_out = Vec::new();
    let mut m_universal = 0usize;
    let mut all_so_far = true;
    for m in 1..=args.max_m.min(args.n as usize) {
        let trees = enumerate_free_trees_with_cap(m, DEFAULT_ENUMERATION_CAP)
            .map_err(|e| CliError::Input(e.to_string()))?;
        let mut all_this_size = true;
        for t in trees {
            let found = find_induced(&t, &host, DEFAULT_ORACLE_CAP)
                .map_err(|e| CliError::Input(e.to_string()))?;
            if found.is_none() {
                all_this_size = false;
            }
            trees_out.push(OracleTreeOut {
                m,
                canonical: canonical_form(&t),
                labels: found.map(|ls| ls.iter().map(BigUint::to_string).collect()),
            });
        }
        if all_so_far && all_this_size {
            m_universal = m;
        } else {
            all_so_far = false;
        }
    }
    let out = OracleOutput {
        manifest: Manifest {
            subcommand: "oracle",
            version: env!("CARGO_PKG_VERSION"),
            input_digest: None,
            config: serde_json::json!({ "n": args.n, "max_m": args.max_m }),
        },
        n: args.n,
        max_m: args.max_m,
        m_universal,
        trees: trees_out,
    };
    write_output(&args.json, &to_json(&out))
}

fn cmd_stats(args: &StatsArgs) -> Result<(), CliError> {
    let (graph, kind) = match args.kind {
        KindArg::Prime => (AmbientGraph::prime_sum(args.n), "prime"),
        KindArg::Coprime => {
            let q = args
                .q
                .ok_or_else(|| CliError::Input("coprime stats require --q".into()))?;
            (AmbientGraph::coprime_sum(args.n, q), "coprime")
        }
    };
    let (exact, edge_count, avg, std_error) = if args.n <= DEFAULT_EXHAUSTIVE_CAP {
        let stats = average_degree(&graph, DEFAULT_EXHAUSTIVE_CAP)
            .map_err(|e| CliError::Input(e.to_string()))?;
        (true, Some(stats.edge_count), stats.average_degree, None)
    } else {
        let est = estimate_average_degree(
            &graph,
            args.samples,
            args.seed,
            &PrimalityConfig::default(),
        )
        .map_err(|e| CliError::Input(e.to_string()))?;
        (false, None, est.average_degree, Some(est.std_error))
    };
    let bipartite = match args.kind {
        KindArg::Prime if args.n <= BIPARTITE_SCAN_CAP => Some(check_bipartite_parity(args.n)),
        _ => None,
    };
    let out = StatsOutput {
        manifest: Manifest {
            subcommand: "stats",
            version: env!("CARGO_PKG_VERSION"),
            input_digest: None,
            config: serde_json::json!({
                "kind": kind,
                "n": args.n,
                "q": args.q,
                "samples": args.samples,
                "seed": args.seed,
            }),
        },
        kind,
        n: args.n,
        q: args.q,
        exact,
        edge_count,
        average_degree: avg,
        std_error,
        bipartite,
    };
    write_output(&args.json, &to_json(&out))
}

fn cmd_gen_tree(args: &GenTreeArgs) -> Result<(), CliError> {
    if args.m == 0 {
        return Err(CliError::Input("tree needs at least one vertex".into()));
    }
    let tree = random_tree(args.m, args.seed);
    let text = tree.serialize();
    match &args.out {
        Some(path) => std::fs::write(path, &text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Embed(args) => cmd_embed(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Stats(args) => cmd_stats(args),
        Command::GenTree(args) => cmd_gen_tree(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
