//! Seeded random graph generators: random regular and connected
//! Watts–Strogatz families.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::Graph;

/// Attempts of the pairing model before giving up on a seed.
const PAIRING_ATTEMPTS: usize = 500;
/// Regenerations of a Watts–Strogatz draw before reporting a connectivity
/// failure.
const CONNECTIVITY_ATTEMPTS: u64 = 100;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("no d-regular graph exists: n*d must be even and d < n (n = {n}, d = {d})")]
    InfeasibleRegular { n: usize, d: usize },
    #[error("pairing model produced no simple graph in {0} attempts; retry with a new seed")]
    PairingFailed(usize),
    #[error("ring degree k must be even, positive, and k < n (n = {n}, k = {k})")]
    InvalidRingDegree { n: usize, k: usize },
    #[error("rewiring probability must lie in [0, 1], got {0}")]
    InvalidBeta(f64),
    #[error("no connected graph found in {0} regenerations")]
    ConnectivityFailed(u64),
}

/// Generates a simple d-regular graph on `n` vertices via the pairing model.
///
/// Each attempt shuffles `n * d` half-edge points and pairs them up; attempts
/// with self-loops or multi-edges are rejected. Deterministic for a fixed
/// seed.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph, GenError> {
    if n == 0 || d >= n || !(n * d).is_multiple_of(2) {
        return Err(GenError::InfeasibleRegular { n, d });
    }
    if d == 0 {
        return Ok(Graph::from_edges(n, Vec::new()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<usize> = (0..n * d).collect();

    'attempt: for _ in 0..PAIRING_ATTEMPTS {
        points.shuffle(&mut rng);
        let mut edges: Vec<(usize, usize)> = Vec::with_capacity(n * d / 2);
        for pair in points.chunks_exact(2) {
            let (u, v) = (pair[0] / d, pair[1] / d);
            if u == v {
                continue 'attempt;
            }
            edges.push((u.min(v), u.max(v)));
        }
        let mut sorted = edges.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            continue 'attempt;
        }
        return Ok(Graph::from_edges(n, edges));
    }
    Err(GenError::PairingFailed(PAIRING_ATTEMPTS))
}

/// Generates a connected Watts–Strogatz graph: a ring lattice where each
/// vertex joins its `k/2` nearest neighbors on each side, with every lattice
/// edge rewired with probability `beta`.
///
/// Disconnected draws are regenerated from incremented seeds up to a bound,
/// so the result is deterministic for a fixed seed. Edge count is always
/// `n * k / 2`.
pub fn watts_strogatz(n: usize, k: usize, beta: f64, seed: u64) -> Result<Graph, GenError> {
    if k == 0 || !k.is_multiple_of(2) || k >= n {
        return Err(GenError::InvalidRingDegree { n, k });
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(GenError::InvalidBeta(beta));
    }

    for attempt in 0..CONNECTIVITY_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt));
        let g = ws_draw(n, k, beta, &mut rng);
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(GenError::ConnectivityFailed(CONNECTIVITY_ATTEMPTS))
}

fn ws_draw(n: usize, k: usize, beta: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut edge_set: std::collections::BTreeSet<(usize, usize)> = (0..n)
        .flat_map(|i| (1..=k / 2).map(move |j| ordered(i, (i + j) % n)))
        .collect();

    // Rewire the "clockwise" lattice edges in ring order, one offset at a
    // time, keeping the far endpoint random and the near endpoint fixed.
    for j in 1..=k / 2 {
        for i in 0..n {
            if beta == 0.0 || rng.gen::<f64>() >= beta {
                continue;
            }
            let old = ordered(i, (i + j) % n);
            if !edge_set.contains(&old) {
                continue;
            }
            // A saturated vertex has nowhere to rewire to.
            let degree_i = edge_set.iter().filter(|&&(a, b)| a == i || b == i).count();
            if degree_i >= n - 1 {
                continue;
            }
            let target = loop {
                let w = rng.gen_range(0..n);
                if w != i && !edge_set.contains(&ordered(i, w)) {
                    break w;
                }
            };
            edge_set.remove(&old);
            edge_set.insert(ordered(i, target));
        }
    }
    Graph::from_edges(n, edge_set)
}

fn ordered(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}
