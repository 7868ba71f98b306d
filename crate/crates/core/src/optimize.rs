//! Classical outer loop: circuit loss and derivative-free parameter search.
//!
//! The loss is the negated Hamming-weight expectation of the simulated
//! circuit, so minimizing it maximizes the expected independent-set size.
//! Search is Nelder–Mead with seeded uniform-random restarts; all-zero angles
//! are a stationary point (the circuit leaves the empty set untouched), so
//! initial points are always perturbed away from zero. A single evaluation
//! budget is shared sequentially across restarts, which makes runs with more
//! restarts strict extensions of runs with fewer.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ansatz::MixerSchedule;
use crate::rng::derive_seed;
use crate::simulator::{initial_state, simulate, SimError};

#[derive(Debug, Error)]
pub enum OptimizeError {
    #[error("schedule has no active mixer slots to optimize")]
    NoActiveSlots,
    #[error("init_scale must lie in (0, π], got {0}")]
    InvalidInitScale(f64),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// How restart initial points are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitPolicy {
    /// Each angle uniform in `(0, init_scale]`.
    UniformRandom,
    /// Each angle uniform in `(0, init_scale / 100]`, barely off the
    /// all-zeros stationary point.
    ZerosPerturbed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Total loss evaluations across all restarts.
    pub max_evals: usize,
    pub init_policy: InitPolicy,
    /// Upper end of the initialization range, in radians.
    pub init_scale: f64,
    pub seed: u64,
    pub restarts: usize,
    /// A restart stops once its simplex loss spread falls below this.
    pub convergence_tol: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            max_evals: 500,
            init_policy: InitPolicy::UniformRandom,
            init_scale: std::f64::consts::FRAC_PI_4,
            seed: 0,
            restarts: 3,
            convergence_tol: 1e-4,
        }
    }
}

/// One loss evaluation in the order it happened.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub eval: usize,
    pub loss: f64,
    pub restart: usize,
}

#[derive(Debug, Clone)]
pub struct OptimizeResult {
    pub best_params: Vec<f64>,
    pub best_loss: f64,
    pub trace: Vec<TraceEntry>,
}

/// Negated Hamming-weight expectation of the circuit run from all zeros.
pub fn loss(schedule: &MixerSchedule, params: &[f64]) -> Result<f64, OptimizeError> {
    let state = simulate(schedule, params, initial_state(schedule.num_wires(), None)?)?;
    Ok(-state.expectation_hamming())
}

/// Minimizes [`loss`] over the schedule's parameters.
///
/// Runs Nelder–Mead restarts until the shared evaluation budget is spent or
/// every restart has converged, and returns the best parameters seen together
/// with the full evaluation trace. Deterministic for a fixed config.
pub fn optimize(
    schedule: &MixerSchedule,
    cfg: &OptimizerConfig,
) -> Result<OptimizeResult, OptimizeError> {
    if schedule.active_slot_count() == 0 {
        return Err(OptimizeError::NoActiveSlots);
    }
    if cfg.init_scale <= 0.0 || cfg.init_scale > std::f64::consts::PI {
        return Err(OptimizeError::InvalidInitScale(cfg.init_scale));
    }
    let dim = schedule.param_count();
    let max_evals = cfg.max_evals.max(1);

    let mut trace: Vec<TraceEntry> = Vec::with_capacity(max_evals);
    let mut best: Option<(f64, Vec<f64>)> = None;

    for restart in 0..cfg.restarts.max(1) {
        if trace.len() >= max_evals {
            break;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, restart as u64));
        let upper = match cfg.init_policy {
            InitPolicy::UniformRandom => cfg.init_scale,
            InitPolicy::ZerosPerturbed => cfg.init_scale / 100.0,
        };
        let start: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.0..upper) + f64::EPSILON).collect();

        let mut eval = |params: &[f64], trace: &mut Vec<TraceEntry>| -> Result<Option<f64>, OptimizeError> {
            if trace.len() >= max_evals {
                return Ok(None);
            }
            let value = loss(schedule, params)?;
            trace.push(TraceEntry { eval: trace.len(), loss: value, restart });
            if best.as_ref().is_none_or(|(b, _)| value < *b) {
                best = Some((value, params.to_vec()));
            }
            Ok(Some(value))
        };

        nelder_mead(&mut eval, &start, cfg.convergence_tol, &mut trace)?;
    }

    let (best_loss, best_params) = best.expect("max_evals >= 1 evaluates at least one point");
    Ok(OptimizeResult { best_params, best_loss, trace })
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;
const SIMPLEX_STEP: f64 = 0.25;

type EvalFn<'a> = dyn FnMut(&[f64], &mut Vec<TraceEntry>) -> Result<Option<f64>, OptimizeError> + 'a;

/// Standard Nelder–Mead loop. `eval` returns `None` once the shared budget is
/// exhausted, which ends the run immediately.
fn nelder_mead(
    eval: &mut EvalFn<'_>,
    start: &[f64],
    tol: f64,
    trace: &mut Vec<TraceEntry>,
) -> Result<(), OptimizeError> {
    let dim = start.len();
    let mut simplex: Vec<(f64, Vec<f64>)> = Vec::with_capacity(dim + 1);

    match eval(start, trace)? {
        Some(v) => simplex.push((v, start.to_vec())),
        None => return Ok(()),
    }
    for i in 0..dim {
        let mut point = start.to_vec();
        point[i] += SIMPLEX_STEP;
        match eval(&point, trace)? {
            Some(v) => simplex.push((v, point)),
            None => return Ok(()),
        }
    }

    loop {
        simplex.sort_by(|a, b| a.0.total_cmp(&b.0));
        let spread = simplex[dim].0 - simplex[0].0;
        if spread.abs() < tol {
            return Ok(());
        }

        let centroid: Vec<f64> = (0..dim)
            .map(|j| simplex[..dim].iter().map(|(_, p)| p[j]).sum::<f64>() / dim as f64)
            .collect();
        let worst = simplex[dim].clone();
        let toward = |coef: f64| -> Vec<f64> {
            (0..dim)
                .map(|j| centroid[j] + coef * (centroid[j] - worst.1[j]))
                .collect()
        };

        let reflected = toward(REFLECT);
        let fr = match eval(&reflected, trace)? {
            Some(v) => v,
            None => return Ok(()),
        };

        if fr < simplex[0].0 {
            let expanded = toward(EXPAND);
            let fe = match eval(&expanded, trace)? {
                Some(v) => v,
                None => return Ok(()),
            };
            simplex[dim] = if fe < fr { (fe, expanded) } else { (fr, reflected) };
            continue;
        }
        if fr < simplex[dim - 1].0 {
            simplex[dim] = (fr, reflected);
            continue;
        }

        let (base_value, base_point) = if fr < worst.0 { (fr, &reflected) } else { (worst.0, &worst.1) };
        let contracted: Vec<f64> = (0..dim)
            .map(|j| centroid[j] + CONTRACT * (base_point[j] - centroid[j]))
            .collect();
        let fc = match eval(&contracted, trace)? {
            Some(v) => v,
            None => return Ok(()),
        };
        if fc < base_value {
            simplex[dim] = (fc, contracted);
            continue;
        }

        // Shrink toward the best vertex.
        let best_point = simplex[0].1.clone();
        for entry in simplex.iter_mut().skip(1) {
            let shrunk: Vec<f64> = (0..dim)
                .map(|j| best_point[j] + SHRINK * (entry.1[j] - best_point[j]))
                .collect();
            match eval(&shrunk, trace)? {
                Some(v) => *entry = (v, shrunk),
                None => return Ok(()),
            }
        }
    }
}

/// Writes a trace as `eval_index,loss,restart_id` CSV.
pub fn write_trace_csv<W: std::io::Write>(
    mut writer: W,
    trace: &[TraceEntry],
) -> std::io::Result<()> {
    writeln!(writer, "eval_index,loss,restart_id")?;
    for entry in trace {
        writeln!(writer, "{},{},{}", entry.eval, entry.loss, entry.restart)?;
    }
    Ok(())
}
