//! Command-line front end for the pruning solvers.
//!
//! Exit codes: 0 on success, 1 when a solve is infeasible within its
//! budget and error threshold, 2 on any input or usage problem.
//! Everything the tool writes is deterministic for fixed inputs and
//! seeds, except the `wall_ms` field of solve summaries.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{mpsc, Mutex};
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use prunex_core::classify::{classify_naive, HldIndex};
use prunex_core::gen::{
    gen_hitting_set, gen_independent_set, gen_nonmonotone, gen_random, Graph, RandomParams,
};
use prunex_core::heuristics::{heuristic_raising, heuristic_replacement, HeuristicResult};
use prunex_core::ingest::{
    induce_greedy, load_dataset_csv, read_tree, write_dataset_csv, write_tree, InduceOptions,
    LoadOptions,
};
use prunex_core::oracle::{enumerate_pruned_trees_capped, oracle_pareto, DEFAULT_CUT_CAP};
use prunex_core::raise::{is_prunable_to, pareto_raising, solve_raising_boxdp};
use prunex_core::replace::{pareto_replacement, solve_replacement, PruneOutcome};
use prunex_core::tree::Node;
use prunex_core::{Dataset, Operation, Rat, Tree, Variant};

#[derive(Parser)]
#[command(
    name = "prunex",
    version,
    about = "Exact pruning of binary decision trees: minimum-error prunings, \
             Pareto fronts over pruning budgets, instance generators, and \
             greedy-versus-optimal comparisons."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Grow a decision tree greedily from a CSV dataset
    Induce(InduceArgs),
    /// Report whether every leaf is non-empty and majority-labeled
    Validate(ValidateArgs),
    /// Route examples through a tree and emit predictions
    Classify(ClassifyArgs),
    /// Solve a single pruning query
    #[command(subcommand)]
    Prune(PruneCmd),
    /// Sweep the full budget/error Pareto front
    #[command(subcommand)]
    Pareto(ParetoCmd),
    /// Generate instances with independently known answers
    #[command(subcommand)]
    Gen(GenCmd),
    /// Brute-force fronts by enumerating every reachable pruning
    Oracle(OracleArgs),
    /// Run greedy heuristics against exact fronts over instance directories
    Compare(CompareArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    /// prune exactly k cuts
    Exact,
    /// prune k or more cuts
    Atleast,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Exact => Variant::Exact,
            VariantArg::Atleast => Variant::AtLeast,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OpArg {
    /// subtree replacement
    Rep,
    /// subtree raising
    Raise,
}

#[derive(Args)]
struct InduceArgs {
    /// Training data CSV (last column is the class unless --class-col)
    #[arg(long)]
    data: PathBuf,
    /// Name of the class column
    #[arg(long)]
    class_col: Option<String>,
    /// Smallest number of examples allowed on each side of a split
    #[arg(long, default_value_t = 1)]
    min_leaf: usize,
    /// Stop growing below this depth
    #[arg(long)]
    max_depth: Option<usize>,
    /// Where to write the tree JSON (stdout if omitted)
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Tree JSON
    #[arg(long)]
    tree: PathBuf,
    /// Dataset CSV
    #[arg(long)]
    data: PathBuf,
    /// Where to write the report JSON (stdout if omitted)
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Tree JSON
    #[arg(long)]
    tree: PathBuf,
    /// Examples CSV (classes present but ignored for routing)
    #[arg(long)]
    data: PathBuf,
    /// Route through the heavy-light index instead of plain descent
    #[arg(long)]
    hld: bool,
    /// Where to write the predictions CSV (stdout if omitted)
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum PruneCmd {
    /// Subtree replacement: prune at least k cuts, minimizing errors
    Rep(PruneRepArgs),
    /// Subtree raising: prune exactly or at least k cuts, minimizing errors
    Raise(PruneRaiseArgs),
}

#[derive(Args)]
struct PruneRepArgs {
    #[arg(long)]
    tree: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// Number of cuts to prune (at-least semantics)
    #[arg(short)]
    k: usize,
    /// Reject solutions with more training errors than this
    #[arg(short)]
    t: Option<usize>,
    /// Where to write the witness tree JSON
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Where to write the summary JSON (stdout if omitted)
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct PruneRaiseArgs {
    #[arg(long)]
    tree: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// Number of cuts to prune
    #[arg(short)]
    k: usize,
    /// Reject solutions with more training errors than this
    #[arg(short)]
    t: Option<usize>,
    /// Budget variant: exactly k or at least k
    #[arg(long, value_enum, default_value_t = VariantArg::Exact)]
    variant: VariantArg,
    /// Abort if the solve runs longer than this many seconds
    #[arg(long)]
    time_budget: Option<f64>,
    /// Where to write the witness tree JSON
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Where to write the summary JSON (stdout if omitted)
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ParetoCmd {
    /// Replacement front: min errors per at-least-k budget
    Rep(ParetoRepArgs),
    /// Raising front: min errors per budget, exact or at-least
    Raise(ParetoRaiseArgs),
}

#[derive(Args)]
struct ParetoRepArgs {
    #[arg(long)]
    tree: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// Where to write the front CSV (stdout if omitted)
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ParetoRaiseArgs {
    #[arg(long)]
    tree: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// Which front to emit
    #[arg(long, value_enum, default_value_t = VariantArg::Exact)]
    variant: VariantArg,
    /// Abort if the sweep runs longer than this many seconds
    #[arg(long)]
    time_budget: Option<f64>,
    /// Where to write the front CSV (stdout if omitted)
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenCmd {
    /// Gap family: zero errors only at budgets 0 and k
    Nonmono(GenNonmonoArgs),
    /// Independent-set reduction with brute-forced ground truth
    Indset(GenIndsetArgs),
    /// Hitting-set reduction with brute-forced ground truth
    Hitset(GenHitsetArgs),
    /// Seeded random dataset with a greedily induced tree
    Random(GenRandomArgs),
}

#[derive(Args)]
struct GenNonmonoArgs {
    /// Full budget of the gap (at least 2)
    #[arg(short)]
    k: usize,
    /// Output directory (data.csv, tree.json, instance.json)
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenIndsetArgs {
    /// Graph file: first line the vertex count, then 1-indexed "u v" edges
    #[arg(long, conflicts_with_all = ["vertices", "edge_prob"])]
    graph: Option<PathBuf>,
    /// Generate a random graph with this many vertices instead
    #[arg(long)]
    vertices: Option<usize>,
    /// Edge probability for the random graph
    #[arg(long, default_value_t = 0.3)]
    edge_prob: f64,
    /// Seed for the random graph
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Independent-set size to ask for
    #[arg(long)]
    kappa: usize,
    /// Output directory (graph.txt, data.csv, tree.json, instance.json)
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenHitsetArgs {
    /// Universe size; elements are 1..=universe in the flags below
    #[arg(long)]
    universe: usize,
    /// A set to hit, as comma-separated 1-indexed elements; repeatable
    #[arg(long = "set", required = true)]
    sets: Vec<String>,
    /// Hitting-set size to ask for
    #[arg(long)]
    kappa: usize,
    /// Output directory (data.csv, tree.json, instance.json)
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenRandomArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of examples
    #[arg(short, default_value_t = 30)]
    n: usize,
    /// Number of features
    #[arg(short, default_value_t = 3)]
    d: usize,
    /// Feature values are integers in 0..value-range
    #[arg(long, default_value_t = 6)]
    value_range: i64,
    /// Probability of the blue class
    #[arg(long, default_value_t = 0.5)]
    class_balance: f64,
    /// min_leaf for the induced tree
    #[arg(long, default_value_t = 1)]
    min_leaf: usize,
    /// Output directory (data.csv, tree.json, instance.json)
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    tree: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// Which pruning operation to enumerate
    #[arg(long, value_enum)]
    op: OpArg,
    /// Refuse trees with more cuts than this (enumeration is exponential)
    #[arg(long, default_value_t = DEFAULT_CUT_CAP)]
    cap: usize,
    /// Where to write the fronts CSV (stdout if omitted)
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Which pruning operation to compare against
    #[arg(long, value_enum)]
    op: OpArg,
    /// Instance directories, each holding data.csv and tree.json
    #[arg(required = true)]
    instances: Vec<PathBuf>,
    /// Where to write the report CSV (stdout if omitted)
    #[arg(short, long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}

fn run(command: Command) -> Result<i32> {
    match command {
        Command::Induce(a) => cmd_induce(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Prune(PruneCmd::Rep(a)) => cmd_prune_rep(a),
        Command::Prune(PruneCmd::Raise(a)) => cmd_prune_raise(a),
        Command::Pareto(ParetoCmd::Rep(a)) => cmd_pareto_rep(a),
        Command::Pareto(ParetoCmd::Raise(a)) => cmd_pareto_raise(a),
        Command::Gen(g) => cmd_gen(g),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Compare(a) => cmd_compare(a),
    }
}

// ---------------------------------------------------------------------------
// Shared plumbing

fn load_data(path: &Path) -> Result<Dataset> {
    load_dataset_csv::<Rat>(path, &LoadOptions::default())
        .with_context(|| format!("reading dataset {}", path.display()))
}

fn load_tree(path: &Path) -> Result<Tree> {
    read_tree::<Rat>(path).with_context(|| format!("reading tree {}", path.display()))
}

/// Write to the path, or to stdout when no path was given.
fn emit(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, content).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Run `f` on a worker thread and give up after `budget` seconds. The
/// worker is abandoned on timeout; the process is about to exit anyway.
fn with_time_budget<T: Send + 'static>(
    budget: Option<f64>,
    f: impl FnOnce() -> T + Send + 'static,
) -> Result<T> {
    let Some(secs) = budget else { return Ok(f()) };
    let (tx, rx) = mpsc::channel();
    std::thread::spawn(move || {
        let _ = tx.send(f());
    });
    rx.recv_timeout(Duration::from_secs_f64(secs))
        .map_err(|_| anyhow::anyhow!("time budget of {secs} s exceeded"))
}

fn front_csv(front: &[usize]) -> String {
    let mut out = String::from("k,min_errors\n");
    for (k, e) in front.iter().enumerate() {
        out.push_str(&format!("{k},{e}\n"));
    }
    out
}

fn summary_json(
    k: usize,
    t: usize,
    wall_ms: u128,
    outcome: Option<&PruneOutcome<Rat>>,
) -> String {
    let doc = serde_json::json!({
        "feasible": outcome.is_some(),
        "k": k,
        "t": t,
        "min_errors": outcome.map(|o| o.min_errors),
        "pruned_nodes": outcome.map(|o| o.pruned_nodes.clone()).unwrap_or_default(),
        "wall_ms": wall_ms,
    });
    serde_json::to_string_pretty(&doc).expect("summary serializes") + "\n"
}

// ---------------------------------------------------------------------------
// Subcommands

fn cmd_induce(a: InduceArgs) -> Result<i32> {
    let options = LoadOptions {
        class_col: a.class_col,
        ..LoadOptions::default()
    };
    let data = load_dataset_csv::<Rat>(&a.data, &options)
        .with_context(|| format!("reading dataset {}", a.data.display()))?;
    let tree = induce_greedy(
        &data,
        &InduceOptions {
            min_leaf: a.min_leaf,
            max_depth: a.max_depth,
        },
    );
    emit(
        a.out.as_deref(),
        &prunex_core::ingest::tree_to_json(&tree),
    )?;
    Ok(0)
}

fn cmd_validate(a: ValidateArgs) -> Result<i32> {
    let tree = load_tree(&a.tree)?;
    let data = load_data(&a.data)?;
    let report = tree.validate_reasonable(&data);
    let doc = serde_json::json!({
        "reasonable": report.is_reasonable(),
        "empty_leaves": report.empty_leaves,
        "non_majority_leaves": report.non_majority_leaves,
        "errors": tree.errors_on(&data),
    });
    emit(
        a.out.as_deref(),
        &(serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"),
    )?;
    Ok(0)
}

fn cmd_classify(a: ClassifyArgs) -> Result<i32> {
    let tree = load_tree(&a.tree)?;
    let options = LoadOptions {
        dedup_contradictions: false, // predict every input row
        ..LoadOptions::default()
    };
    let data = load_dataset_csv::<Rat>(&a.data, &options)
        .with_context(|| format!("reading dataset {}", a.data.display()))?;

    let index = a.hld.then(|| HldIndex::build(&tree));
    let mut out = String::from("id,predicted\n");
    for e in data.examples() {
        let (leaf, _probes) = match &index {
            Some(idx) => idx.classify(&tree, &e.values),
            None => classify_naive(&tree, &e.values),
        };
        let Node::Leaf { label } = tree.node(leaf) else {
            unreachable!("routing ends at a leaf");
        };
        out.push_str(&format!("{},{}\n", e.id, label));
    }
    emit(a.out.as_deref(), &out)?;
    Ok(0)
}

fn cmd_prune_rep(a: PruneRepArgs) -> Result<i32> {
    let tree = load_tree(&a.tree)?;
    let data = load_data(&a.data)?;
    let t = a.t.unwrap_or(data.len());

    let start = Instant::now();
    let outcome = solve_replacement(&tree, &data, Variant::AtLeast, a.k, t);
    let wall_ms = start.elapsed().as_millis();

    if let Some(o) = &outcome {
        if o.tree.errors_on(&data) != o.min_errors {
            bail!("witness does not reproduce its reported errors");
        }
        if let Some(out) = &a.out {
            write_tree(out, &o.tree).with_context(|| format!("writing {}", out.display()))?;
        }
    }
    emit(
        a.summary.as_deref(),
        &summary_json(a.k, t, wall_ms, outcome.as_ref()),
    )?;
    Ok(if outcome.is_some() { 0 } else { 1 })
}

fn cmd_prune_raise(a: PruneRaiseArgs) -> Result<i32> {
    let tree = load_tree(&a.tree)?;
    let data = load_data(&a.data)?;
    let t = a.t.unwrap_or(data.len());
    let variant: Variant = a.variant.into();

    let start = Instant::now();
    let outcome = {
        let tree = tree.clone();
        let data = data.clone();
        with_time_budget(a.time_budget, move || {
            solve_raising_boxdp(&tree, &data, variant, a.k, t)
        })?
    };
    let wall_ms = start.elapsed().as_millis();

    if let Some(o) = &outcome {
        if !is_prunable_to(&tree, &o.tree) {
            bail!("witness is not reachable by raising");
        }
        if o.tree.errors_on(&data) != o.min_errors {
            bail!("witness does not reproduce its reported errors");
        }
        if let Some(out) = &a.out {
            write_tree(out, &o.tree).with_context(|| format!("writing {}", out.display()))?;
        }
    }
    emit(
        a.summary.as_deref(),
        &summary_json(a.k, t, wall_ms, outcome.as_ref()),
    )?;
    Ok(if outcome.is_some() { 0 } else { 1 })
}

fn cmd_pareto_rep(a: ParetoRepArgs) -> Result<i32> {
    let tree = load_tree(&a.tree)?;
    let data = load_data(&a.data)?;
    let front = pareto_replacement(&tree, &data);
    emit(a.out.as_deref(), &front_csv(&front))?;
    Ok(0)
}

fn cmd_pareto_raise(a: ParetoRaiseArgs) -> Result<i32> {
    let tree = load_tree(&a.tree)?;
    let data = load_data(&a.data)?;
    let fronts = {
        let tree = tree.clone();
        let data = data.clone();
        with_time_budget(a.time_budget, move || pareto_raising(&tree, &data))?
    };
    let front = match a.variant {
        VariantArg::Exact => &fronts.exact,
        VariantArg::Atleast => &fronts.at_least,
    };
    emit(a.out.as_deref(), &front_csv(front))?;
    Ok(0)
}

fn cmd_gen(g: GenCmd) -> Result<i32> {
    match g {
        GenCmd::Nonmono(a) => {
            if a.k < 2 {
                bail!("the gap family needs -k of at least 2");
            }
            let inst = gen_nonmonotone::<Rat>(a.k);
            let doc = serde_json::json!({
                "family": "nonmono",
                "k": inst.k,
                "s": inst.tree.num_cuts(),
            });
            write_instance_dir(&a.out, &inst.data, &inst.tree, &doc)
        }
        GenCmd::Indset(a) => {
            let graph = match (&a.graph, a.vertices) {
                (Some(path), None) => {
                    let text = fs::read_to_string(path)
                        .with_context(|| format!("reading graph {}", path.display()))?;
                    Graph::parse(&text)
                        .with_context(|| format!("parsing graph {}", path.display()))?
                }
                (None, Some(n)) => {
                    if !(0.0..=1.0).contains(&a.edge_prob) {
                        bail!("--edge-prob must be in [0, 1]");
                    }
                    let mut rng = rand_seed(a.seed);
                    Graph::random(&mut rng, n, a.edge_prob)
                }
                _ => bail!("give exactly one of --graph or --vertices"),
            };
            let inst = gen_independent_set::<Rat>(&graph, a.kappa);
            let doc = serde_json::json!({
                "family": "indset",
                "vertices": graph.n(),
                "edges": graph.edges().len(),
                "kappa": a.kappa,
                "solve": solve_doc(&inst.solve),
                "truth": inst.truth,
            });
            write_instance_dir(&a.out, &inst.data, &inst.tree, &doc)?;
            fs::write(a.out.join("graph.txt"), graph.to_text())
                .with_context(|| format!("writing {}", a.out.join("graph.txt").display()))?;
            Ok(0)
        }
        GenCmd::Hitset(a) => {
            let mut sets: Vec<Vec<usize>> = Vec::new();
            for spec in &a.sets {
                let mut set = Vec::new();
                for tok in spec.split(',') {
                    let e: usize = tok
                        .trim()
                        .parse()
                        .ok()
                        .filter(|&e| e >= 1 && e <= a.universe)
                        .with_context(|| {
                            format!("--set {spec:?}: elements are 1..={}", a.universe)
                        })?;
                    set.push(e - 1);
                }
                if set.is_empty() {
                    bail!("--set {spec:?} is empty");
                }
                sets.push(set);
            }
            if a.kappa > a.universe {
                bail!("--kappa cannot exceed --universe");
            }
            let inst = gen_hitting_set::<Rat>(a.universe, &sets, a.kappa);
            let doc = serde_json::json!({
                "family": "hitset",
                "universe": a.universe,
                "sets": a.sets,
                "kappa": a.kappa,
                "solve": solve_doc(&inst.solve),
                "truth": inst.truth,
            });
            write_instance_dir(&a.out, &inst.data, &inst.tree, &doc)
        }
        GenCmd::Random(a) => {
            let params = RandomParams {
                n: a.n,
                d: a.d,
                value_range: a.value_range,
                class_balance: a.class_balance,
                min_leaf: a.min_leaf,
            };
            if a.n == 0 || a.d == 0 || a.value_range <= 0 {
                bail!("-n, -d, and --value-range must be positive");
            }
            if !(0.0..=1.0).contains(&a.class_balance) {
                bail!("--class-balance must be in [0, 1]");
            }
            let (data, tree) = gen_random::<Rat>(a.seed, &params);
            let doc = serde_json::json!({
                "family": "random",
                "seed": a.seed,
                "n": a.n,
                "d": a.d,
                "value_range": a.value_range,
                "class_balance": a.class_balance,
                "min_leaf": a.min_leaf,
                "s": tree.num_cuts(),
            });
            write_instance_dir(&a.out, &data, &tree, &doc)
        }
    }
}

fn rand_seed(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

fn solve_doc(solve: &prunex_core::SolveSpec) -> serde_json::Value {
    serde_json::json!({
        "operation": match solve.operation {
            Operation::Replacement => "rep",
            Operation::Raising => "raise",
        },
        "variant": match solve.variant {
            Variant::Exact => "exact",
            Variant::AtLeast => "atleast",
        },
        "k": solve.k,
        "t": solve.t,
    })
}

fn write_instance_dir(
    dir: &Path,
    data: &Dataset,
    tree: &Tree,
    instance: &serde_json::Value,
) -> Result<i32> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write_dataset_csv(dir.join("data.csv"), data)
        .with_context(|| format!("writing {}", dir.join("data.csv").display()))?;
    write_tree(dir.join("tree.json"), tree)
        .with_context(|| format!("writing {}", dir.join("tree.json").display()))?;
    let text = serde_json::to_string_pretty(instance).expect("instance serializes") + "\n";
    fs::write(dir.join("instance.json"), text)
        .with_context(|| format!("writing {}", dir.join("instance.json").display()))?;
    Ok(0)
}

fn cmd_oracle(a: OracleArgs) -> Result<i32> {
    let tree = load_tree(&a.tree)?;
    let data = load_data(&a.data)?;
    let op = match a.op {
        OpArg::Rep => Operation::Replacement,
        OpArg::Raise => Operation::Raising,
    };
    let reach = enumerate_pruned_trees_capped(&tree, &data, op, a.cap)
        .context("enumerating prunings")?;
    let fronts = oracle_pareto(&reach);

    let cell = |o: Option<usize>| o.map(|v| v.to_string()).unwrap_or_default();
    let mut out = String::from("k,exact,at_least\n");
    for k in 0..fronts.exact.len() {
        out.push_str(&format!(
            "{k},{},{}\n",
            cell(fronts.exact[k]),
            cell(fronts.at_least[k])
        ));
    }
    emit(a.out.as_deref(), &out)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// compare

struct CompareRow {
    dataset: String,
    s: usize,
    k_heur: usize,
    t_heur: usize,
    k_star: usize,
    t_star: usize,
}

fn cmd_compare(a: CompareArgs) -> Result<i32> {
    let jobs: Vec<PathBuf> = a.instances;
    let threads = compare_threads(jobs.len());

    let slots: Vec<Mutex<Option<Result<CompareRow>>>> =
        jobs.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(dir) = jobs.get(i) else { break };
                let row = compare_one(dir, a.op);
                *slots[i].lock().expect("slot lock") = Some(row);
            });
        }
    });

    let mut out = String::from("dataset,s,k_heur,t_heur,k_star,t_star\n");
    for slot in slots {
        let row = slot
            .into_inner()
            .expect("slot lock")
            .expect("every job ran")?;
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            csv_field(&row.dataset),
            row.s,
            row.k_heur,
            row.t_heur,
            row.k_star,
            row.t_star
        ));
    }
    emit(a.out.as_deref(), &out)?;
    Ok(0)
}

/// Worker count: `PRUNEX_THREADS` if set, otherwise the machine's
/// parallelism, never more than there are jobs.
fn compare_threads(jobs: usize) -> usize {
    let cap = std::env::var("PRUNEX_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&v| v >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        });
    cap.min(jobs).max(1)
}

fn compare_one(dir: &Path, op: OpArg) -> Result<CompareRow> {
    let data = load_data(&dir.join("data.csv"))?;
    let tree = load_tree(&dir.join("tree.json"))?;
    let s = tree.num_cuts();

    let HeuristicResult {
        k_used, t_result, ..
    } = match op {
        OpArg::Rep => heuristic_replacement(&tree, &data),
        OpArg::Raise => heuristic_raising(&tree, &data),
    };

    // at-least fronts on both sides: pruning more for the same errors is
    // the direction that makes the heuristic look good
    let front: Vec<usize> = match op {
        OpArg::Rep => pareto_replacement(&tree, &data),
        OpArg::Raise => pareto_raising(&tree, &data).at_least,
    };
    let t_star = front[k_used];
    let k_star = (0..=s)
        .rev()
        .find(|&k| front[k] <= t_result)
        .expect("front[0] never exceeds the heuristic's errors");

    let dataset = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| dir.display().to_string());
    Ok(CompareRow {
        dataset,
        s,
        k_heur: k_used,
        t_heur: t_result,
        k_star,
        t_star,
    })
}

/// Quote a CSV field only when it needs it.
fn csv_field(raw: &str) -> String {
    if raw.contains([',', '"', '\n']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw.to_string()
    }
}
