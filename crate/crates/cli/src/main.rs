//! Command-line harness for the dcmis solvers: partition inspection,
//! single-circuit and iterative runs, the exact oracle, schedule inspection,
//! and report comparison.
//!
//! Runs write `report.json` (full accounting), `trace.csv` (optimizer loss
//! trace for single runs, global-weight progress for iterative runs) and
//! `partition.json` into the output directory, and print a one-line summary.
//! Any module error exits nonzero with a JSON object on stderr.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dcmis::ansatz::{
    build_interleaved_schedule, build_schedule, sparsify_separator, sparsify_separator_per_vertex,
};
use dcmis::graph::generate::{random_regular, watts_strogatz, GenError};
use dcmis::graph::io::{load_graph, GraphFormat, LoadError};
use dcmis::graph::oracle::{exact_mis_capped, DEFAULT_ORACLE_CAP};
use dcmis::graph::Graph;
use dcmis::optimize::{write_trace_csv, OptimizerConfig};
use dcmis::partition::{validate_partition, PartitionError};
use dcmis::simulator::{initial_state, simulate};
use dcmis::solver::{
    partition_for, solve_iterative, solve_single, RunReport, SolveError, SolverConfig,
};

/// Env var overriding the exact-oracle vertex cap used for ratios.
const ORACLE_CAP_VAR: &str = "DCMIS_ORACLE_CAP";

#[derive(Parser)]
#[command(name = "dcmis", version, about = "Divide-and-conquer MIS solver on simulated mixer circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Partition a graph's edges and report the separator.
    Partition(PartitionCmd),
    /// Solve the whole graph with one deferred-constraint circuit.
    SolveSingle(SolveCmd),
    /// Solve by sweeping local circuits over the separator vertices.
    SolveIterative(SolveCmd),
    /// Print the exact maximum independent set (oracle).
    Exact(ExactCmd),
    /// Dump the partition and mixer schedule a run would use.
    Inspect(InspectCmd),
    /// Compare two report.json files over the same graph.
    Compare(CompareCmd),
}

#[derive(Args)]
struct GraphSource {
    /// Path to a graph file.
    #[arg(long, conflicts_with = "gen")]
    graph: Option<PathBuf>,
    /// Generated graph spec: `reg:n,d` (random d-regular) or `ws:n,k,beta`
    /// (connected Watts-Strogatz).
    #[arg(long)]
    gen: Option<String>,
    /// Input format for --graph.
    #[arg(long, value_enum, default_value_t = FormatArg::Auto)]
    format: FormatArg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Auto,
    EdgeList,
    MatrixMarket,
}

impl GraphSource {
    fn load(&self, seed: u64) -> Result<Graph> {
        match (&self.graph, &self.gen) {
            (Some(path), None) => {
                let format = match self.format {
                    FormatArg::Auto => GraphFormat::from_path(path),
                    FormatArg::EdgeList => GraphFormat::EdgeList,
                    FormatArg::MatrixMarket => GraphFormat::MatrixMarket,
                };
                let loaded = load_graph(path, format)
                    .with_context(|| format!("loading {}", path.display()))?;
                if loaded.self_loops_dropped > 0 || loaded.duplicates_merged > 0 {
                    eprintln!(
                        "note: dropped {} self-loops, merged {} duplicate edges",
                        loaded.self_loops_dropped, loaded.duplicates_merged
                    );
                }
                Ok(loaded.graph)
            }
            (None, Some(spec)) => generate(spec, seed),
            _ => bail!("provide exactly one graph source: --graph PATH or --gen SPEC"),
        }
    }
}

fn generate(spec: &str, seed: u64) -> Result<Graph> {
    let (family, params) = spec
        .split_once(':')
        .with_context(|| format!("generator spec {spec:?} is not FAMILY:PARAMS"))?;
    let fields: Vec<&str> = params.split(',').collect();
    match (family, fields.as_slice()) {
        ("reg", [n, d]) => {
            let (n, d) = (n.parse()?, d.parse()?);
            Ok(random_regular(n, d, seed)?)
        }
        ("ws", [n, k, beta]) => {
            let (n, k, beta) = (n.parse()?, k.parse()?, beta.parse()?);
            Ok(watts_strogatz(n, k, beta, seed)?)
        }
        _ => bail!("unknown generator spec {spec:?}; expected reg:n,d or ws:n,k,beta"),
    }
}

#[derive(Args)]
struct SolverFlags {
    /// Edge-partition block count.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Partition imbalance tolerance.
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    /// Cut budget for the separator block.
    #[arg(long, default_value_t = 6)]
    budget: usize,
    /// Measurement shots per circuit.
    #[arg(long, default_value_t = 1024)]
    shots: usize,
    /// Iterative sweeps over the separator.
    #[arg(long, default_value_t = 2)]
    sweeps: usize,
    /// Circuit layers.
    #[arg(long, default_value_t = 1)]
    layers: usize,
    /// RNG seed for generation, partitioning, optimization, and sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Loss-evaluation budget of the optimizer (shared across restarts).
    #[arg(long, default_value_t = 500)]
    max_evals: usize,
    /// Optimizer restarts.
    #[arg(long, default_value_t = 3)]
    restarts: usize,
    /// Largest statevector any single circuit may use.
    #[arg(long, default_value_t = 24)]
    qubit_cap: usize,
    /// Interleave separator mixers instead of deferring them, charging each
    /// kept separator vertex its full outside neighborhood.
    #[arg(long)]
    no_defer: bool,
}

impl SolverFlags {
    fn config(&self) -> SolverConfig {
        let oracle_cap = std::env::var(ORACLE_CAP_VAR)
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(DEFAULT_ORACLE_CAP);
        SolverConfig {
            k: self.k,
            epsilon: self.epsilon,
            budget: self.budget,
            shots: self.shots,
            sweeps: self.sweeps,
            layers: self.layers,
            optimizer: OptimizerConfig {
                max_evals: self.max_evals,
                restarts: self.restarts,
                seed: self.seed,
                ..OptimizerConfig::default()
            },
            seed: self.seed,
            qubit_cap: self.qubit_cap,
            oracle_cap,
            defer: !self.no_defer,
        }
    }
}

#[derive(Args)]
struct SolveCmd {
    #[command(flatten)]
    source: GraphSource,
    #[command(flatten)]
    flags: SolverFlags,
    /// Output directory for report.json, trace.csv, partition.json.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct PartitionCmd {
    #[command(flatten)]
    source: GraphSource,
    #[command(flatten)]
    flags: SolverFlags,
    /// Output directory for partition.json.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct ExactCmd {
    #[command(flatten)]
    source: GraphSource,
    /// Seed used only when the graph is generated.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct InspectCmd {
    #[command(flatten)]
    source: GraphSource,
    #[command(flatten)]
    flags: SolverFlags,
    /// Output directory for partition.json and schedule.json.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Also dump the top-M amplitudes of the circuit simulated at seeded
    /// random parameters.
    #[arg(long)]
    amps: Option<usize>,
}

#[derive(Args)]
struct CompareCmd {
    report_a: PathBuf,
    report_b: PathBuf,
    /// Write the comparison CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(err) => {
            let payload = serde_json::json!({
                "error": { "kind": classify(&err), "message": format!("{err:#}") }
            });
            eprintln!("{payload}");
            std::process::exit(1);
        }
    }
}

fn classify(err: &anyhow::Error) -> &'static str {
    if err.downcast_ref::<LoadError>().is_some() {
        "load"
    } else if err.downcast_ref::<GenError>().is_some() {
        "generate"
    } else if err.downcast_ref::<PartitionError>().is_some() {
        "partition"
    } else if err.downcast_ref::<SolveError>().is_some() {
        "solve"
    } else if err.downcast_ref::<std::io::Error>().is_some() {
        "io"
    } else if err.downcast_ref::<serde_json::Error>().is_some() {
        "report"
    } else {
        "cli"
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Partition(cmd) => partition_cmd(cmd),
        Command::SolveSingle(cmd) => solve_cmd(cmd, false),
        Command::SolveIterative(cmd) => solve_cmd(cmd, true),
        Command::Exact(cmd) => exact_cmd(cmd),
        Command::Inspect(cmd) => inspect_cmd(cmd),
        Command::Compare(cmd) => compare_cmd(cmd),
    }
}

fn write_json<T: serde::Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(value)?)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn partition_cmd(cmd: PartitionCmd) -> Result<()> {
    let g = cmd.source.load(cmd.flags.seed)?;
    let cfg = cmd.flags.config();
    let partition = partition_for(&g, &cfg)?;
    let report = validate_partition(&g, &partition);
    let cost = dcmis::partition::replication_cost(&g, &partition.labels)?;
    write_json(&cmd.out, "partition.json", &partition)?;
    for violation in &report.violations {
        eprintln!("violation: {violation}");
    }
    println!(
        "k={} cost={} separator={} parts={:?} valid={}",
        partition.k,
        cost,
        partition.separator.len(),
        partition.parts.iter().map(Vec::len).collect::<Vec<_>>(),
        report.is_valid()
    );
    Ok(())
}

fn solve_cmd(cmd: SolveCmd, iterative: bool) -> Result<()> {
    let g = cmd.source.load(cmd.flags.seed)?;
    let cfg = cmd.flags.config();
    let report = if iterative { solve_iterative(&g, &cfg)? } else { solve_single(&g, &cfg)? };

    write_json(&cmd.out, "report.json", &report)?;
    if let Ok(partition) = partition_for(&g, &cfg) {
        write_json(&cmd.out, "partition.json", &partition)?;
    }

    fs::create_dir_all(&cmd.out)?;
    let trace_path = cmd.out.join("trace.csv");
    if iterative {
        let mut text = String::from("circuit_index,sweep,vertex,weight\n");
        for p in &report.progress {
            text.push_str(&format!("{},{},{},{}\n", p.circuit_index, p.sweep, p.vertex, p.weight));
        }
        fs::write(&trace_path, text)?;
    } else {
        let trace = report.circuits.first().map(|c| c.loss_trace.as_slice()).unwrap_or(&[]);
        let mut out = Vec::new();
        write_trace_csv(&mut out, trace)?;
        fs::write(&trace_path, out)?;
    }

    for warning in &report.warnings {
        eprintln!("warning: {warning}");
    }
    println!("{}", summary_line(&report));
    Ok(())
}

fn summary_line(report: &RunReport) -> String {
    let ratio = report
        .approx_ratio
        .map(|r| format!("{r:.4}"))
        .unwrap_or_else(|| "n/a".into());
    format!(
        "weight={} ratio={} inactive_mixers={} cuts={} circuits={}",
        report.weight, ratio, report.inactive_mixers, report.cut_count, report.circuits_run
    )
}

fn exact_cmd(cmd: ExactCmd) -> Result<()> {
    let g = cmd.source.load(cmd.seed)?;
    let cap = std::env::var(ORACLE_CAP_VAR)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_ORACLE_CAP);
    let sol = exact_mis_capped(&g, cap).context("exact oracle")?;
    println!("weight={} bitstring={}", sol.weight(), sol.to_bitstring());
    Ok(())
}

fn inspect_cmd(cmd: InspectCmd) -> Result<()> {
    let g = cmd.source.load(cmd.flags.seed)?;
    let cfg = cmd.flags.config();
    let partition = partition_for(&g, &cfg)?;
    let (kept, cuts) = if cfg.defer {
        let (kept, neighborhood) = sparsify_separator(&g, &partition.separator, cfg.budget);
        (kept, neighborhood.len())
    } else {
        sparsify_separator_per_vertex(&g, &partition.separator, cfg.budget)
    };
    let inactive: std::collections::BTreeSet<usize> = partition
        .separator
        .iter()
        .copied()
        .filter(|v| kept.binary_search(v).is_err())
        .collect();
    let schedule = if cfg.defer {
        build_schedule(&g, &partition.parts, &partition.separator, &inactive, cfg.layers)?
    } else {
        let everything: Vec<usize> = (0..g.n()).collect();
        build_interleaved_schedule(&g, &everything, &inactive, cfg.layers)?
    };

    write_json(&cmd.out, "partition.json", &partition)?;
    write_json(&cmd.out, "schedule.json", &schedule)?;
    println!(
        "wires={} slots={} active={} inactive={} params={} cuts={} separator_kept={}/{}",
        schedule.num_wires(),
        schedule.slots.len(),
        schedule.active_slot_count(),
        schedule.inactive_slot_count(),
        schedule.param_count(),
        cuts,
        kept.len(),
        partition.separator.len()
    );

    if let Some(top) = cmd.amps {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let params: Vec<f64> = (0..schedule.param_count())
            .map(|_| rng.gen_range(0.0..std::f64::consts::FRAC_PI_2))
            .collect();
        let state = simulate(&schedule, &params, initial_state(schedule.num_wires(), None)?)?;
        let mut entries: Vec<(usize, f64)> = state
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(idx, a)| (idx, a.norm_sqr()))
            .collect();
        entries.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let dump: Vec<serde_json::Value> = entries
            .into_iter()
            .take(top)
            .map(|(idx, prob)| {
                let amp = state.amplitudes()[idx];
                let bits: String = (0..schedule.num_wires())
                    .map(|w| if idx >> w & 1 == 1 { '1' } else { '0' })
                    .collect();
                serde_json::json!({
                    "wire_bits": bits,
                    "probability": prob,
                    "re": amp.re,
                    "im": amp.im,
                })
            })
            .collect();
        println!("{}", serde_json::to_string_pretty(&dump)?);
    }
    Ok(())
}

fn compare_cmd(cmd: CompareCmd) -> Result<()> {
    let a: RunReport = serde_json::from_str(
        &fs::read_to_string(&cmd.report_a)
            .with_context(|| format!("reading {}", cmd.report_a.display()))?,
    )?;
    let b: RunReport = serde_json::from_str(
        &fs::read_to_string(&cmd.report_b)
            .with_context(|| format!("reading {}", cmd.report_b.display()))?,
    )?;
    if a.graph != b.graph {
        bail!(
            "reports cover different graphs: {:?} vs {:?}",
            a.graph,
            b.graph
        );
    }

    let mut csv = String::from("metric,a,b,delta\n");
    let rows: Vec<(&str, f64, f64)> = vec![
        ("weight", a.weight as f64, b.weight as f64),
        ("inactive_mixers", a.inactive_mixers as f64, b.inactive_mixers as f64),
        ("cut_count", a.cut_count as f64, b.cut_count as f64),
        ("circuits_run", a.circuits_run as f64, b.circuits_run as f64),
    ];
    for (name, va, vb) in rows {
        csv.push_str(&format!("{name},{va},{vb},{}\n", vb - va));
    }
    match (a.approx_ratio, b.approx_ratio) {
        (Some(ra), Some(rb)) => {
            csv.push_str(&format!("approx_ratio,{ra:.4},{rb:.4},{:.4}\n", rb - ra));
        }
        _ => csv.push_str("approx_ratio,n/a,n/a,n/a\n"),
    }

    match cmd.out {
        Some(path) => fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{csv}"),
    }
    Ok(())
}
