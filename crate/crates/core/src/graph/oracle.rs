//! Classical MIS oracles: an exact branch-and-bound solver for validation and
//! approximation ratios, and the min-degree greedy baseline.

use thiserror::Error;

use super::{Graph, Solution};

/// Default vertex-count limit for the exact oracle. Callers that need larger
/// instances use [`exact_mis_capped`].
pub const DEFAULT_ORACLE_CAP: usize = 40;

/// Hard representation limit of the branch-and-bound solver (bitmask width).
const MASK_WIDTH: usize = 128;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("graph has {n} vertices, above the exact-oracle cap of {cap}")]
    SizeLimitExceeded { n: usize, cap: usize },
}

/// Computes a maximum independent set exactly.
///
/// Branch and bound over bitmask vertex sets: branches on a maximum-degree
/// candidate vertex, prunes with a greedy clique-cover upper bound, and takes
/// degree ≤ 1 candidates outright. Intended for validation at desk scale; the
/// cap keeps accidental huge inputs from hanging the caller.
pub fn exact_mis(g: &Graph) -> Result<Solution, OracleError> {
    exact_mis_capped(g, DEFAULT_ORACLE_CAP)
}

/// [`exact_mis`] with an explicit size cap (still limited to 128 vertices by
/// the bitmask representation).
pub fn exact_mis_capped(g: &Graph, cap: usize) -> Result<Solution, OracleError> {
    let n = g.n();
    if n > cap.min(MASK_WIDTH) {
        return Err(OracleError::SizeLimitExceeded {
            n,
            cap: cap.min(MASK_WIDTH),
        });
    }

    let nbr: Vec<u128> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u128, |m, &u| m | (1 << u)))
        .collect();
    let all: u128 = if n == MASK_WIDTH { !0 } else { (1 << n) - 1 };

    let mut search = Search {
        nbr: &nbr,
        best_size: 0,
        best_mask: 0,
    };
    search.expand(all, 0, 0);

    let bits = (0..n).map(|v| search.best_mask >> v & 1 == 1).collect();
    Ok(Solution::from_bits(bits))
}

struct Search<'a> {
    nbr: &'a [u128],
    best_size: usize,
    best_mask: u128,
}

impl Search<'_> {
    fn expand(&mut self, mut cand: u128, mut size: usize, mut chosen: u128) {
        // Take isolated and degree-1 candidates outright; both are always
        // part of some maximum solution of the remaining subproblem.
        loop {
            let mut reduced = false;
            let mut scan = cand;
            while scan != 0 {
                let v = scan.trailing_zeros() as usize;
                scan &= scan - 1;
                let local = self.nbr[v] & cand;
                if local.count_ones() <= 1 {
                    chosen |= 1 << v;
                    size += 1;
                    cand &= !(local | (1 << v));
                    reduced = true;
                    break;
                }
            }
            if !reduced {
                break;
            }
        }

        if cand == 0 {
            if size > self.best_size {
                self.best_size = size;
                self.best_mask = chosen;
            }
            return;
        }
        if size + self.clique_cover_bound(cand) <= self.best_size {
            return;
        }

        // Branch on a maximum-degree candidate, smallest id on ties.
        let mut pick = usize::MAX;
        let mut pick_deg = 0;
        let mut scan = cand;
        while scan != 0 {
            let v = scan.trailing_zeros() as usize;
            scan &= scan - 1;
            let deg = (self.nbr[v] & cand).count_ones() as usize;
            if deg > pick_deg {
                pick_deg = deg;
                pick = v;
            }
        }
        let v = pick;

        self.expand(cand & !(self.nbr[v] | (1 << v)), size + 1, chosen | (1 << v));
        self.expand(cand & !(1 << v), size, chosen);
    }

    /// Greedy clique cover of the candidate set; an independent set takes at
    /// most one vertex per clique, so the cover size bounds what remains.
    fn clique_cover_bound(&self, cand: u128) -> usize {
        let mut rest = cand;
        let mut cliques = 0;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= !(1 << v);
            let mut clique = 1u128 << v;
            let mut scan = rest;
            while scan != 0 {
                let u = scan.trailing_zeros() as usize;
                scan &= scan - 1;
                if self.nbr[u] & clique == clique {
                    clique |= 1 << u;
                    rest &= !(1 << u);
                }
            }
            cliques += 1;
        }
        cliques
    }
}

/// Builds a maximal independent set by repeatedly taking a minimum-degree
/// vertex (smallest id on ties) and deleting its closed neighborhood.
pub fn greedy_mis(g: &Graph) -> Solution {
    let n = g.n();
    let mut alive = vec![true; n];
    let mut degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut remaining = n;
    let mut bits = vec![false; n];

    while remaining > 0 {
        let v = (0..n)
            .filter(|&v| alive[v])
            .min_by_key(|&v| (degree[v], v))
            .expect("remaining > 0");
        bits[v] = true;
        let mut removed = vec![v];
        removed.extend(g.neighbors(v).iter().copied().filter(|&u| alive[u]));
        for u in removed {
            alive[u] = false;
            remaining -= 1;
            for &w in g.neighbors(u) {
                if alive[w] {
                    degree[w] -= 1;
                }
            }
        }
    }
    Solution::from_bits(bits)
}
