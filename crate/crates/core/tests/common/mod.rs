//! Shared helpers for the integration and acceptance suites: seeded random
//! graphs and brute-force oracles kept independent of the library's solver
//! paths.

use dcmis::graph::Graph;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Erdős–Rényi-style random graph with `n` in `n_min..=n_max` and a random
/// edge density.
pub fn random_graph(rng: &mut ChaCha8Rng, n_min: usize, n_max: usize) -> Graph {
    let n = rng.gen_range(n_min..=n_max);
    let p: f64 = rng.gen_range(0.15..0.75);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// Like [`random_graph`] but guaranteed to have at least one edge.
pub fn random_graph_with_edges(rng: &mut ChaCha8Rng, n_min: usize, n_max: usize) -> Graph {
    loop {
        let g = random_graph(rng, n_min.max(2), n_max);
        if g.edge_count() > 0 {
            return g;
        }
    }
}

/// Exhaustive maximum independent set weight; usable up to ~20 vertices.
#[allow(dead_code)]
pub fn brute_force_mis_weight(g: &Graph) -> usize {
    assert!(g.n() <= 20);
    let mut best = 0;
    'outer: for mask in 0u32..(1u32 << g.n()) {
        for &(u, v) in g.edges() {
            if mask >> u & 1 == 1 && mask >> v & 1 == 1 {
                continue 'outer;
            }
        }
        best = best.max(mask.count_ones() as usize);
    }
    best
}

/// Minimum replication cost over all balanced 2-labelings; exponential in the
/// edge count.
#[allow(dead_code)]
pub fn brute_force_partition_optimum(g: &Graph, epsilon: f64) -> usize {
    let m = g.edge_count();
    assert!((1..=12).contains(&m));
    let cap = dcmis::partition::block_cap(m, 2, epsilon);
    let mut best = usize::MAX;
    for mask in 0u32..(1 << m) {
        let labels: Vec<usize> = (0..m).map(|e| (mask >> e & 1) as usize).collect();
        let ones = mask.count_ones() as usize;
        if ones > cap || m - ones > cap {
            continue;
        }
        best = best.min(dcmis::partition::replication_cost(g, &labels).unwrap());
    }
    best
}
