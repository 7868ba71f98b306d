//! End-to-end solvers: the single-circuit pipeline (partition → sparsify →
//! schedule → optimize → sample) and the iterative sweep solver that keeps
//! every local subproblem small enough to simulate.

use std::collections::BTreeSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ansatz::{
    build_interleaved_schedule, build_schedule, cut_count, order_vertices, sparsify_separator,
    sparsify_separator_per_vertex, AnsatzError, MixerSchedule,
};
use crate::graph::oracle::{exact_mis_capped, OracleError, DEFAULT_ORACLE_CAP};
use crate::graph::{Graph, Solution};
use crate::optimize::{optimize, OptimizeError, OptimizerConfig, TraceEntry};
use crate::partition::{edge_partition, EdgePartition, PartitionError};
use crate::rng::derive_seed;
use crate::simulator::{initial_state, simulate, SimError, StateVector};

const SALT_PARTITION: u64 = 0x11;
const SALT_OPTIMIZER: u64 = 0x22;
const SALT_SAMPLER: u64 = 0x33;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("graph needs {n} qubits, above the single-circuit cap of {cap}; use the iterative solver")]
    QubitCapExceeded { n: usize, cap: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("solution violates independence")]
    InvalidSolution,
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Ansatz(#[from] AnsatzError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Optimize(#[from] OptimizeError),
}

/// Full configuration of a solver run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Edge-partition block count.
    pub k: usize,
    /// Partition imbalance tolerance.
    pub epsilon: f64,
    /// Cut budget for the separator block.
    pub budget: usize,
    /// Measurement shots per circuit.
    pub shots: usize,
    /// Iterative sweeps over the separator.
    pub sweeps: usize,
    /// Circuit layers (repetitions of the mixer/phase pattern).
    pub layers: usize,
    pub optimizer: OptimizerConfig,
    pub seed: u64,
    /// Largest statevector any single circuit may use.
    pub qubit_cap: usize,
    /// Largest graph the exact oracle is asked to score.
    pub oracle_cap: usize,
    /// Defer separator mixers to the end of the circuit. Turning this off
    /// interleaves all mixers in one degree ordering and charges each kept
    /// separator vertex its full outside neighborhood.
    pub defer: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            k: 2,
            epsilon: 0.05,
            budget: 6,
            shots: 1024,
            sweeps: 2,
            layers: 1,
            optimizer: OptimizerConfig::default(),
            seed: 0,
            qubit_cap: 24,
            oracle_cap: DEFAULT_ORACLE_CAP,
            defer: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphInfo {
    pub n: usize,
    pub m: usize,
    pub fingerprint: u64,
}

impl GraphInfo {
    pub fn of(g: &Graph) -> Self {
        GraphInfo { n: g.n(), m: g.edge_count(), fingerprint: g.fingerprint() }
    }
}

/// Accounting for one executed circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitReport {
    pub label: String,
    pub sweep: Option<usize>,
    pub separator_vertex: Option<usize>,
    pub wires: usize,
    pub active_mixers: usize,
    pub inactive_mixers: usize,
    pub cut_count: usize,
    pub evals: usize,
    pub best_loss: f64,
    /// Whether the local update was kept (iterative mode only).
    pub accepted: Option<bool>,
    pub loss_trace: Vec<TraceEntry>,
}

/// Global solution weight after each executed local circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgressPoint {
    pub circuit_index: usize,
    pub sweep: usize,
    pub vertex: usize,
    pub weight: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedVertex {
    pub vertex: usize,
    pub sweep: usize,
    pub reason: String,
}

/// Everything a run produced. `wall_time_ms` is the only field that varies
/// between identical runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub mode: String,
    pub graph: GraphInfo,
    pub config: SolverConfig,
    pub solution: String,
    pub weight: usize,
    pub valid: bool,
    /// Deactivated mixers summed over executed circuits.
    pub inactive_mixers: usize,
    /// Largest per-circuit cut count (every executed circuit stays within the
    /// budget, so this does too).
    pub cut_count: usize,
    pub circuits_run: usize,
    pub approx_ratio: Option<f64>,
    pub optimal_weight: Option<usize>,
    pub circuits: Vec<CircuitReport>,
    pub progress: Vec<ProgressPoint>,
    pub skipped: Vec<SkippedVertex>,
    pub warnings: Vec<String>,
    pub wall_time_ms: u64,
}

impl RunReport {
    pub fn solution_bits(&self) -> Vec<bool> {
        self.solution.chars().map(|c| c == '1').collect()
    }
}

/// Weight and optional approximation ratio of a solution against an oracle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionScore {
    pub weight: usize,
    pub approx_ratio: Option<f64>,
    pub optimal_weight: Option<usize>,
}

/// Scores a solution, rejecting invalid ones.
pub fn score_solution(
    g: &Graph,
    sol: &Solution,
    oracle: Option<&Solution>,
) -> Result<SolutionScore, SolveError> {
    if !sol.is_valid_for(g) {
        return Err(SolveError::InvalidSolution);
    }
    Ok(SolutionScore {
        weight: sol.weight(),
        approx_ratio: oracle.map(|o| sol.weight() as f64 / o.weight() as f64),
        optimal_weight: oracle.map(Solution::weight),
    })
}

/// The edge partition a solver run with this config uses, for inspection and
/// replay.
pub fn partition_for(g: &Graph, cfg: &SolverConfig) -> Result<EdgePartition, SolveError> {
    Ok(edge_partition(g, cfg.k, cfg.epsilon, derive_seed(cfg.seed, SALT_PARTITION))?)
}

fn validate_config(cfg: &SolverConfig) -> Result<(), SolveError> {
    if cfg.shots == 0 {
        return Err(SolveError::InvalidConfig("shots must be at least 1".into()));
    }
    if cfg.sweeps == 0 {
        return Err(SolveError::InvalidConfig("sweeps must be at least 1".into()));
    }
    if cfg.layers == 0 {
        return Err(SolveError::InvalidConfig("layers must be at least 1".into()));
    }
    Ok(())
}

/// Runs the exact oracle if the graph fits under the configured cap.
fn oracle_for(g: &Graph, cfg: &SolverConfig, warnings: &mut Vec<String>) -> Option<Solution> {
    match exact_mis_capped(g, cfg.oracle_cap) {
        Ok(sol) => Some(sol),
        Err(OracleError::SizeLimitExceeded { n, cap }) => {
            warnings.push(format!(
                "exact oracle skipped: {n} vertices above the cap of {cap}; no approximation ratio"
            ));
            None
        }
    }
}

/// Picks the best sampled basis index: maximum Hamming weight, ties broken by
/// the lexicographically smallest bitstring in vertex-id order.
fn best_sample(state: &StateVector, qubits: &[usize], shots: usize, seed: u64) -> usize {
    let mut wire_order: Vec<usize> = (0..qubits.len()).collect();
    wire_order.sort_unstable_by_key(|&w| qubits[w]);
    state
        .sample(shots, seed)
        .into_iter()
        .min_by_key(|&idx| {
            let bits: Vec<bool> = wire_order.iter().map(|&w| idx >> w & 1 == 1).collect();
            (std::cmp::Reverse(idx.count_ones()), bits)
        })
        .expect("shots >= 1")
}

struct ScheduleRun {
    best_loss: f64,
    evals: usize,
    trace: Vec<TraceEntry>,
    best_index: usize,
}

/// Optimizes a schedule and samples the best bitstring from the optimized
/// state.
fn run_circuit(
    schedule: &MixerSchedule,
    cfg: &SolverConfig,
    circuit_salt: u64,
) -> Result<ScheduleRun, SolveError> {
    let opt_cfg = OptimizerConfig {
        seed: derive_seed(cfg.seed, SALT_OPTIMIZER.wrapping_add(circuit_salt)),
        ..cfg.optimizer
    };
    let result = optimize(schedule, &opt_cfg)?;
    let state = simulate(
        schedule,
        &result.best_params,
        initial_state(schedule.num_wires(), None)?,
    )?;
    let best_index = best_sample(
        &state,
        &schedule.qubits,
        cfg.shots,
        derive_seed(cfg.seed, SALT_SAMPLER.wrapping_add(circuit_salt)),
    );
    Ok(ScheduleRun {
        best_loss: result.best_loss,
        evals: result.trace.len(),
        trace: result.trace,
        best_index,
    })
}

/// Report skeleton for runs that never execute a circuit.
fn degenerate_report(
    mode: &str,
    g: &Graph,
    cfg: &SolverConfig,
    sol: Solution,
    mut warnings: Vec<String>,
    started: Instant,
) -> Result<RunReport, SolveError> {
    let oracle = oracle_for(g, cfg, &mut warnings);
    let score = score_solution(g, &sol, oracle.as_ref())?;
    Ok(RunReport {
        mode: mode.into(),
        graph: GraphInfo::of(g),
        config: *cfg,
        solution: sol.to_bitstring(),
        weight: sol.weight(),
        valid: true,
        inactive_mixers: 0,
        cut_count: 0,
        circuits_run: 0,
        approx_ratio: score.approx_ratio,
        optimal_weight: score.optimal_weight,
        circuits: Vec::new(),
        progress: Vec::new(),
        skipped: Vec::new(),
        warnings,
        wall_time_ms: started.elapsed().as_millis() as u64,
    })
}

/// Solves the whole graph with one deferred-constraint circuit.
///
/// Pipeline: edge partition, separator sparsification under the cut budget,
/// schedule construction, parameter optimization, measurement; the best
/// sampled bitstring wins.
pub fn solve_single(g: &Graph, cfg: &SolverConfig) -> Result<RunReport, SolveError> {
    let started = Instant::now();
    validate_config(cfg)?;
    if g.n() == 0 {
        return Err(SolveError::EmptyGraph);
    }
    if g.n() > cfg.qubit_cap {
        return Err(SolveError::QubitCapExceeded { n: g.n(), cap: cfg.qubit_cap });
    }
    if g.edge_count() == 0 {
        // Every vertex is isolated; all-ones is the unique optimum.
        let sol = Solution::from_bits(vec![true; g.n()]);
        let warnings = vec!["graph has no edges; returning the all-ones solution".into()];
        return degenerate_report("solve-single", g, cfg, sol, warnings, started);
    }

    let partition = partition_for(g, cfg)?;
    let separator = partition.separator.clone();

    let (kept, cuts) = if cfg.defer {
        let (kept, neighborhood) = sparsify_separator(g, &separator, cfg.budget);
        (kept, neighborhood.len())
    } else {
        sparsify_separator_per_vertex(g, &separator, cfg.budget)
    };
    let inactive: BTreeSet<usize> = separator
        .iter()
        .copied()
        .filter(|v| kept.binary_search(v).is_err())
        .collect();

    let schedule = if cfg.defer {
        build_schedule(g, &partition.parts, &separator, &inactive, cfg.layers)?
    } else {
        let everything: Vec<usize> = (0..g.n()).collect();
        build_interleaved_schedule(g, &everything, &inactive, cfg.layers)?
    };
    if cfg.defer {
        debug_assert_eq!(schedule.cut_wires().len(), cut_count(g, &kept, &separator));
        debug_assert_eq!(schedule.cut_wires().len(), cuts);
    }

    let mut warnings = Vec::new();
    if schedule.active_slot_count() == 0 {
        warnings.push("no active mixers under this budget; returning the empty set".into());
        let mut report =
            degenerate_report("solve-single", g, cfg, Solution::empty(g.n()), warnings, started)?;
        report.inactive_mixers = schedule.inactive_slot_count();
        return Ok(report);
    }

    let run = run_circuit(&schedule, cfg, 0)?;
    let mut bits = vec![false; g.n()];
    for (w, &v) in schedule.qubits.iter().enumerate() {
        bits[v] = run.best_index >> w & 1 == 1;
    }
    let sol = Solution::from_bits(bits);
    if !sol.is_valid_for(g) {
        return Err(SolveError::InvalidSolution);
    }

    let oracle = oracle_for(g, cfg, &mut warnings);
    let score = score_solution(g, &sol, oracle.as_ref())?;
    let circuit = CircuitReport {
        label: "single".into(),
        sweep: None,
        separator_vertex: None,
        wires: schedule.num_wires(),
        active_mixers: schedule.active_slot_count(),
        inactive_mixers: schedule.inactive_slot_count(),
        cut_count: cuts,
        evals: run.evals,
        best_loss: run.best_loss,
        accepted: None,
        loss_trace: run.trace,
    };
    Ok(RunReport {
        mode: "solve-single".into(),
        graph: GraphInfo::of(g),
        config: *cfg,
        solution: sol.to_bitstring(),
        weight: sol.weight(),
        valid: true,
        inactive_mixers: schedule.inactive_slot_count(),
        cut_count: cuts,
        circuits_run: 1,
        approx_ratio: score.approx_ratio,
        optimal_weight: score.optimal_weight,
        circuits: vec![circuit],
        progress: Vec::new(),
        skipped: Vec::new(),
        warnings,
        wall_time_ms: started.elapsed().as_millis() as u64,
    })
}

/// Solves a large graph by sweeping over separator vertices, each time
/// re-solving the induced subgraph of the parts around one separator vertex
/// while the rest of the solution stays frozen.
///
/// Local vertices that conflict with the frozen exterior (a neighbor outside
/// the local set already holds a 1) have their mixers deactivated. A local
/// result is accepted only if the global weight does not drop and the global
/// bitstring stays independent, so the progress trace is non-decreasing.
pub fn solve_iterative(g: &Graph, cfg: &SolverConfig) -> Result<RunReport, SolveError> {
    let started = Instant::now();
    validate_config(cfg)?;
    if g.n() == 0 {
        return Err(SolveError::EmptyGraph);
    }
    if g.edge_count() == 0 {
        let sol = Solution::from_bits(vec![true; g.n()]);
        let warnings = vec!["graph has no edges; returning the all-ones solution".into()];
        return degenerate_report("solve-iterative", g, cfg, sol, warnings, started);
    }

    let partition = partition_for(g, cfg)?;
    let mut part_of: Vec<Option<usize>> = vec![None; g.n()];
    for (i, part) in partition.parts.iter().enumerate() {
        for &v in part {
            part_of[v] = Some(i);
        }
    }
    let sweep_order = order_vertices(g, &partition.separator);

    if sweep_order.is_empty() {
        let warnings =
            vec!["partition produced an empty separator; no local solves ran".into()];
        return degenerate_report("solve-iterative", g, cfg, Solution::empty(g.n()), warnings, started);
    }

    let mut x = vec![false; g.n()];
    let mut current_weight = 0usize;
    let mut circuits: Vec<CircuitReport> = Vec::new();
    let mut progress: Vec<ProgressPoint> = Vec::new();
    let mut skipped: Vec<SkippedVertex> = Vec::new();
    let mut warnings: Vec<String> = Vec::new();
    let mut circuit_index = 0usize;

    for sweep in 1..=cfg.sweeps {
        for &s in &sweep_order {
            // Parts the separator vertex touches form the local subproblem.
            let local_part_ids: BTreeSet<usize> =
                g.neighbors(s).iter().filter_map(|&u| part_of[u]).collect();
            let mut local_set: BTreeSet<usize> = local_part_ids
                .iter()
                .flat_map(|&i| partition.parts[i].iter().copied())
                .collect();
            local_set.insert(s);

            if local_set.len() > cfg.qubit_cap {
                skipped.push(SkippedVertex {
                    vertex: s,
                    sweep,
                    reason: format!(
                        "local subproblem needs {} qubits, above the cap of {}",
                        local_set.len(),
                        cfg.qubit_cap
                    ),
                });
                continue;
            }

            // Conflict set: local vertices adjacent to a frozen exterior 1.
            let conflicts: BTreeSet<usize> = local_set
                .iter()
                .copied()
                .filter(|&v| {
                    g.neighbors(v).iter().any(|&u| !local_set.contains(&u) && x[u])
                })
                .collect();

            let cuts_needed = if conflicts.contains(&s) {
                0
            } else {
                g.neighbors(s).iter().filter(|u| !conflicts.contains(u)).count()
            };
            if cuts_needed > cfg.budget {
                skipped.push(SkippedVertex {
                    vertex: s,
                    sweep,
                    reason: format!(
                        "would need {cuts_needed} cuts, above the budget of {}",
                        cfg.budget
                    ),
                });
                continue;
            }

            let local_parts: Vec<Vec<usize>> = local_part_ids
                .iter()
                .map(|&i| partition.parts[i].clone())
                .collect();
            let schedule = build_schedule(g, &local_parts, &[s], &conflicts, cfg.layers)?;
            if schedule.active_slot_count() == 0 {
                skipped.push(SkippedVertex {
                    vertex: s,
                    sweep,
                    reason: "every local mixer is deactivated by conflicts".into(),
                });
                continue;
            }

            let run = run_circuit(&schedule, cfg, circuit_index as u64 + 1)?;

            // Active wires adopt the sampled bits; conflicted wires hold 0
            // (they can never conflict with their own frozen 1: that would
            // contradict independence of the current solution).
            let mut candidate = x.clone();
            for (w, slot) in schedule.slots.iter().enumerate() {
                if slot.active {
                    candidate[slot.vertex] = run.best_index >> w & 1 == 1;
                }
            }
            let candidate_weight = candidate.iter().filter(|&&b| b).count();
            let valid = g.is_independent(&candidate).expect("candidate has length n");
            let accepted = valid && candidate_weight >= current_weight;
            if accepted {
                x = candidate;
                current_weight = candidate_weight;
            }

            circuits.push(CircuitReport {
                label: format!("sweep{sweep}-s{s}"),
                sweep: Some(sweep),
                separator_vertex: Some(s),
                wires: schedule.num_wires(),
                active_mixers: schedule.active_slot_count(),
                inactive_mixers: schedule.inactive_slot_count(),
                cut_count: schedule.cut_wires().len(),
                evals: run.evals,
                best_loss: run.best_loss,
                accepted: Some(accepted),
                loss_trace: run.trace,
            });
            progress.push(ProgressPoint {
                circuit_index,
                sweep,
                vertex: s,
                weight: current_weight,
            });
            circuit_index += 1;
        }
    }

    if circuits.is_empty() {
        warnings.push("every local solve was skipped; returning the empty set".into());
    }
    let sol = Solution::from_bits(x);
    if !sol.is_valid_for(g) {
        return Err(SolveError::InvalidSolution);
    }
    let oracle = oracle_for(g, cfg, &mut warnings);
    let score = score_solution(g, &sol, oracle.as_ref())?;

    Ok(RunReport {
        mode: "solve-iterative".into(),
        graph: GraphInfo::of(g),
        config: *cfg,
        solution: sol.to_bitstring(),
        weight: sol.weight(),
        valid: true,
        inactive_mixers: circuits.iter().map(|c| c.inactive_mixers).sum(),
        cut_count: circuits.iter().map(|c| c.cut_count).max().unwrap_or(0),
        circuits_run: circuits.len(),
        approx_ratio: score.approx_ratio,
        optimal_weight: score.optimal_weight,
        circuits,
        progress,
        skipped,
        warnings,
        wall_time_ms: started.elapsed().as_millis() as u64,
    })
}
